/// @file motion.cpp
/// @brief Node motion: averaged displacements, interface node splitting,
///        hanging-node sliding, node fusion, and the per-step sequencer.

#include "alefv/motion.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <string>
#include <unordered_map>
#include <vector>

#include "alefv/geometry.hpp"

namespace alefv {

namespace {

/// Collinearity tolerance identifying interface edges at a split (relative
/// to the unit line direction).
constexpr Scalar kLineTol = 1e-10;
/// Strict-containment margin for adopting a node as an intermediate,
/// relative to the host span length. Zero shear leaves the node exactly at a
/// span end and must not seed.
constexpr Scalar kSeedTol = 1e-9;
/// Fusion fires when two nodes on one edge close to within this fraction of
/// the shortest adjacent interface edge.
constexpr Scalar kMergeFraction = 0.2;

bool contains(const std::vector<int>& row, int v) {
    return std::find(row.begin(), row.end(), v) != row.end();
}

void erase_value(std::vector<int>& row, int v) {
    row.erase(std::remove(row.begin(), row.end(), v), row.end());
}

void substitute(std::vector<int>& row, int from, int to) {
    std::replace(row.begin(), row.end(), from, to);
}

void push_unique(std::vector<int>& row, int v) {
    if (!contains(row, v)) row.push_back(v);
}

bool node_usable(const Mesh& m, int k) {
    return k >= 0 && k < static_cast<int>(m.nodes.size()) && m.nodes[k].alive &&
           !m.nodes[k].pending_dead;
}

bool edge_usable(const Mesh& m, int e) {
    return e >= 0 && e < static_cast<int>(m.edges.size()) && m.edges[e].alive &&
           !m.edges[e].pending_dead;
}

/// Fold one edge into an identical twin: the surviving edge takes the dead
/// one's owners, adjacency, and intermediates; the dead id is retired.
void collapse_duplicate(Mesh& m, ConnectivityTables& t, int keep, int die) {
    for (const EdgeOwner& o : m.edge_owners(t, die))
        substitute(t.elem2edge[o.elem], die, keep);
    for (int i : t.edge2elem[die]) push_unique(t.edge2elem[keep], i);
    const std::vector<int> row = t.edge2vertex[die];
    for (std::size_t idx = 0; idx < row.size(); ++idx) {
        const int w = row[idx];
        erase_value(t.vertex2edge[w], die);
        if (idx >= 2) push_unique(t.edge2vertex[keep], w);
        push_unique(t.vertex2edge[w], keep);
    }
    // Owners stay ahead of the overlap entries in the merged adjacency row.
    std::vector<int> own;
    for (const EdgeOwner& o : m.edge_owners(t, keep)) own.push_back(o.elem);
    std::stable_partition(t.edge2elem[keep].begin(), t.edge2elem[keep].end(),
                          [&own](int i) { return contains(own, i); });
    t.edge2vertex[die].clear();
    t.edge2elem[die].clear();
    m.retire_edge(die);
}

}  // namespace

// ---- Node velocity -------------------------------------------------------------

Vec2 cheng_shu_velocity(const NodeMotionField& field, const std::vector<int>& stencil) {
    Vec2 sum;
    Scalar total = 0.0;
    for (int i : stencil) {
        const Scalar mass = field.mass[static_cast<std::size_t>(i)];
        sum += field.velocity[static_cast<std::size_t>(i)] * mass;
        total += mass;
    }
    if (!(total > 0.0))
        throw PositivityError("node velocity average: stencil carries no positive mass");
    return sum / total;
}

// ---- Node splitting ---------------------------------------------------------------

int split_node(Mesh& m, int k, const std::vector<int>& left_elems,
               const std::vector<int>& right_elems, const Vec2& left_delta,
               const Vec2& right_delta, const Vec2& line_dir) {
    if (!node_usable(m, k))
        throw TopologyError("split_node: node " + std::to_string(k) + " is not alive");
    if (m.nodes[k].label == NodeLabel::Hanging)
        throw TopologyError("split_node: node " + std::to_string(k) + " hangs on an edge");
    if (left_elems.empty() || right_elems.empty())
        throw TopologyError("split_node: node " + std::to_string(k) +
                            " needs elements on both sides");
    const Scalar dir_len = line_dir.norm();
    if (!(dir_len > 0.0)) throw GeometryError("split_node: zero interface direction");
    const Vec2 dir = line_dir / dir_len;
    const Vec2 x0 = m.nodes[k].coords_old;

    auto side_of = [&](int i) -> int {
        if (contains(left_elems, i)) return -1;
        if (contains(right_elems, i)) return +1;
        throw TopologyError("split_node: element " + std::to_string(i) + " at node " +
                            std::to_string(k) + " is on neither side");
    };

    // Classify the incident edges before touching any table.
    struct JunctionEdge {
        int e = -1;
        int far = -1;
        bool on_line = false;
        bool left = false;
        bool right = false;
    };
    std::vector<JunctionEdge> junction;
    for (int e : m.cur.vertex2edge[k]) {
        const auto& row = m.cur.edge2vertex[e];
        if (row.size() < 2 || (row[0] != k && row[1] != k))
            throw TopologyError("split_node: node " + std::to_string(k) +
                                " is an intermediate of edge " + std::to_string(e));
        JunctionEdge je;
        je.e = e;
        je.far = (row[0] == k) ? row[1] : row[0];
        je.on_line = collinear(x0, x0 + dir, m.nodes[je.far].coords_old, kLineTol);
        const auto owners = m.edge_owners(m.cur, e);
        if (owners.empty())
            throw TopologyError("split_node: edge " + std::to_string(e) + " has no owner");
        for (const EdgeOwner& o : owners) {
            if (side_of(o.elem) < 0)
                je.left = true;
            else
                je.right = true;
        }
        if (je.left && je.right) {
            if (!je.on_line)
                throw GeometryError("split_node: edge " + std::to_string(e) +
                                    " joins both sides off the interface line");
            if (row.size() != 2)
                throw TopologyError("split_node: interface edge " + std::to_string(e) +
                                    " still carries intermediate nodes");
        }
        junction.push_back(je);
    }

    // The copy starts at k's old position and takes the right side; both ids
    // move by the on-line projection of their side's displacement.
    const int k_new = m.allocate_node();
    m.nodes[k_new].coords_old = x0;
    m.nodes[k_new].coords_new = x0 + dir * right_delta.dot(dir);
    m.nodes[k_new].sides = m.nodes[k].sides;
    m.nodes[k].coords_new = x0 + dir * left_delta.dot(dir);
    m.nodes[k].label = NodeLabel::Regular;
    m.nodes[k].host_edge = -1;
    m.nodes[k].host_lift = Vec2{};

    ConnectivityTables* const buffers[2] = {&m.cur, &m.next};

    for (ConnectivityTables* t : buffers) {
        for (int i : right_elems) substitute(t->tri[i], k, k_new);
        t->vertex2elem[k] = left_elems;
        t->vertex2elem[k_new] = right_elems;
    }

    // Edge surgery: right-owned edges re-point at the copy; edges owned by
    // both sides split into two one-sided copies occupying the same loop
    // slots as before.
    std::vector<int> left_line, right_line;
    for (const JunctionEdge& je : junction) {
        if (je.left && je.right) {
            int left_owner = -1, right_owner = -1;
            for (const EdgeOwner& o : m.edge_owners(m.cur, je.e)) {
                if (side_of(o.elem) < 0)
                    left_owner = o.elem;
                else
                    right_owner = o.elem;
            }
            const int f = m.allocate_edge();
            m.edges[f].boundary = m.edges[je.e].boundary;
            for (ConnectivityTables* t : buffers) {
                t->edge2vertex[f] = t->edge2vertex[je.e];
                substitute(t->edge2vertex[f], k, k_new);
                t->edge2elem[f] = {right_owner, left_owner};
                substitute(t->elem2edge[right_owner], je.e, f);
                push_unique(t->vertex2edge[k_new], f);
                push_unique(t->vertex2edge[je.far], f);
            }
            left_line.push_back(je.e);
            right_line.push_back(f);
        } else if (je.right) {
            for (ConnectivityTables* t : buffers) {
                substitute(t->edge2vertex[je.e], k, k_new);
                erase_value(t->vertex2edge[k], je.e);
                push_unique(t->vertex2edge[k_new], je.e);
            }
            if (je.on_line) right_line.push_back(je.e);
        } else {
            if (je.on_line) left_line.push_back(je.e);
        }
    }

    // After a weld across the seam the containing span may not touch the
    // junction: grow the host candidates along their collinear chains,
    // stopping where a straddling node joins the sides again.
    auto straddles = [&](int u) {
        int sign = 0;
        for (int i : m.cur.vertex2elem[u]) {
            if (!m.elems[i].alive) continue;
            Vec2 d = m.element_barycenter(m.cur, i, 0) - x0;
            if (m.period_y > 0.0)
                d.y -= m.period_y * static_cast<Scalar>(std::llround(d.y / m.period_y));
            const Scalar c = dir.cross(d);
            if (c > 0.0) {
                if (sign < 0) return true;
                sign = 1;
            } else if (c < 0.0) {
                if (sign > 0) return true;
                sign = -1;
            }
        }
        return false;
    };
    auto grow_chain = [&](std::vector<int>& line) {
        for (std::size_t q = 0; q < line.size(); ++q) {
            const auto qe = m.edge_endpoints(m.cur, line[q]);
            for (int u : {qe[0], qe[1]}) {
                if (u == k || u == k_new || straddles(u)) continue;
                for (int g : m.cur.vertex2edge[u]) {
                    if (!edge_usable(m, g) || contains(line, g)) continue;
                    const auto& row = m.cur.edge2vertex[g];
                    if (row.size() < 2 || (row[0] != u && row[1] != u)) continue;
                    const int far = row[0] == u ? row[1] : row[0];
                    if (!collinear(x0, x0 + dir, m.nodes[far].coords_old, kLineTol)) continue;
                    line.push_back(g);
                }
            }
        }
    };
    grow_chain(left_line);
    grow_chain(right_line);

    // A moved node becomes an intermediate of the opposite-side edge whose
    // new-time span strictly contains it; that edge then also overlaps the
    // newcomer's own-side elements. At a separating interface end neither
    // span contains the node and it stays regular. On a seam interface the
    // containing span may sit a whole number of periods away, so the node is
    // lifted into the span's window first and remembers the lift.
    auto try_seed = [&](int w, const std::vector<int>& hosts, const std::vector<int>& own) {
        const Scalar sw0 = line_param(m.nodes[w].coords_new, x0, dir);
        const Scalar sshift =
            m.period_y > 0.0
                ? line_param(m.nodes[w].coords_new + Vec2{0.0, m.period_y}, x0, dir) - sw0
                : 0.0;
        for (int e : hosts) {
            const auto ends = m.edge_endpoints(m.cur, e);
            const Scalar sa = line_param(m.nodes[ends[0]].coords_new, x0, dir);
            const Scalar sb = line_param(m.nodes[ends[1]].coords_new, x0, dir);
            const Scalar lo = std::min(sa, sb);
            const Scalar hi = std::max(sa, sb);
            const Scalar margin = kSeedTol * (hi - lo);
            Vec2 lift{};
            Scalar sw = sw0;
            if (sshift != 0.0) {
                const auto wind = std::llround((0.5 * (lo + hi) - sw0) / sshift);
                lift = Vec2{0.0, static_cast<Scalar>(wind) * m.period_y};
                sw = sw0 + static_cast<Scalar>(wind) * sshift;
            }
            if (!(sw > lo + margin && sw < hi - margin)) continue;
            for (ConnectivityTables* t : buffers) {
                t->edge2vertex[e].push_back(w);
                push_unique(t->vertex2edge[w], e);
            }
            m.nodes[w].label = NodeLabel::Hanging;
            m.nodes[w].host_edge = e;
            m.nodes[w].host_lift = lift;
            // Only the newcomer's incident own-side edges overlap the host;
            // the grown chain may reach spans that never touch it.
            for (int g : own) {
                const auto& orow = m.cur.edge2vertex[g];
                if (orow.size() < 2 || (orow[0] != w && orow[1] != w)) continue;
                for (const EdgeOwner& o : m.edge_owners(m.cur, g)) {
                    for (ConnectivityTables* t : buffers)
                        push_unique(t->edge2elem[e], o.elem);
                }
            }
            return;
        }
    };
    try_seed(k, right_line, left_line);
    try_seed(k_new, left_line, right_line);
    return k_new;
}

// ---- Hanging-node slide --------------------------------------------------------------

SlideOutcome slide_hanging_node(Mesh& m, int k, const Vec2& raw_target) {
    if (!node_usable(m, k))
        throw TopologyError("slide: node " + std::to_string(k) + " is not alive");
    NodeRecord& n = m.nodes[k];
    if (n.label != NodeLabel::Hanging || n.host_edge < 0)
        throw TopologyError("slide: node " + std::to_string(k) + " is not hanging");
    const int e = n.host_edge;
    if (!edge_usable(m, e))
        throw TopologyError("slide: host edge of node " + std::to_string(k) + " is dead");
    const auto ends = m.edge_endpoints(m.cur, e);
    const Vec2 a = m.nodes[ends[0]].coords_new;
    const Vec2 b = m.nodes[ends[1]].coords_new;
    const Vec2 span = b - a;
    const Scalar len = span.norm();
    if (!(len > 0.0))
        throw GeometryError("slide: host edge " + std::to_string(e) +
                            " is degenerate at the new time");
    const Vec2 dir = span / len;
    const Vec2 on_host = project_to_line(raw_target + n.host_lift, a, dir);
    n.coords_new = on_host - n.host_lift;

    SlideOutcome out;
    out.applied = n.coords_new;
    const Scalar s = line_param(on_host, a, dir);
    if (s < 0.0) {
        out.merge = true;
        out.merge_with = ends[0];
    } else if (s > len) {
        out.merge = true;
        out.merge_with = ends[1];
    }
    return out;
}

// ---- Node fusion ----------------------------------------------------------------------

void merge_nodes(Mesh& m, int a, int b, MotionReport* report) {
    if (a == b) throw TopologyError("merge_nodes: identical nodes");
    if (!node_usable(m, a) || !node_usable(m, b))
        throw TopologyError("merge_nodes: node " + std::to_string(!node_usable(m, a) ? a : b) +
                            " is not alive");
    const int fn = std::min(a, b);
    const int dn = std::max(a, b);
    ConnectivityTables& t = m.next;

    // Refuse to fuse the two endpoints of a live edge: the edge would
    // degenerate and collapse its elements.
    for (int e : t.vertex2edge[fn]) {
        if (!edge_usable(m, e)) continue;
        const auto& row = t.edge2vertex[e];
        if (row.size() >= 2 &&
            ((row[0] == fn && row[1] == dn) || (row[0] == dn && row[1] == fn)))
            throw TopologyError("merge_nodes: nodes " + std::to_string(fn) + " and " +
                                std::to_string(dn) + " are joined by edge " +
                                std::to_string(e));
    }

    // Wrapped images (positions whole periods apart) pass through each other
    // by re-hosting; averaging them here would drag both mid-window.
    if (m.period_y > 0.0 &&
        std::abs(m.nodes[a].coords_new.y - m.nodes[b].coords_new.y) > 0.5 * m.period_y)
        throw TopologyError("merge_nodes: nodes " + std::to_string(a) + " and " +
                            std::to_string(b) + " sit in different period windows");

    // Both ids take the midpoint, so the old tables (which still reference
    // dn) and the new tables describe the same end-of-step point.
    const Vec2 xm = (m.nodes[fn].coords_new + m.nodes[dn].coords_new) * 0.5;
    m.nodes[fn].coords_new = xm;
    m.nodes[dn].coords_new = xm;

    for (int i : t.vertex2elem[dn]) {
        substitute(t.tri[i], dn, fn);
        push_unique(t.vertex2elem[fn], i);
    }
    t.vertex2elem[dn].clear();

    // Edges carrying only dn re-point at fn; edges carrying both lose the
    // collapsed [dn, fn] segment. If dn sat in an endpoint slot, fn is
    // promoted into it and the other intermediates stay in place.
    const std::vector<int> dn_edges = t.vertex2edge[dn];
    std::vector<int> shared;
    for (int e : dn_edges) {
        auto& row = t.edge2vertex[e];
        if (!contains(row, fn)) {
            substitute(row, dn, fn);
            push_unique(t.vertex2edge[fn], e);
            continue;
        }
        shared.push_back(e);
        if (row[0] == dn || row[1] == dn) {
            erase_value(row, fn);
            substitute(row, dn, fn);
        } else {
            erase_value(row, dn);
        }
    }
    t.vertex2edge[dn].clear();

    // The vanished segment no longer separates anything: each edge that
    // carried it drops the owners of the other carriers from its adjacency.
    std::vector<int> seg_owners;
    for (int e : shared)
        for (const EdgeOwner& o : m.edge_owners(t, e)) push_unique(seg_owners, o.elem);
    for (int e : shared) {
        std::vector<int> own;
        for (const EdgeOwner& o : m.edge_owners(t, e)) own.push_back(o.elem);
        for (int i : seg_owners)
            if (!contains(own, i)) erase_value(t.edge2elem[e], i);
    }

    // Fusion can leave two edges spanning the same endpoints (a conforming
    // edge restored from its two one-sided copies); the larger id dies.
    bool changed = true;
    while (changed) {
        changed = false;
        const std::vector<int> at_fn = t.vertex2edge[fn];
        for (std::size_t ii = 0; ii < at_fn.size() && !changed; ++ii) {
            for (std::size_t jj = ii + 1; jj < at_fn.size() && !changed; ++jj) {
                const int e1 = at_fn[ii];
                const int e2 = at_fn[jj];
                if (e1 == e2 || !edge_usable(m, e1) || !edge_usable(m, e2)) continue;
                const auto& r1 = t.edge2vertex[e1];
                const auto& r2 = t.edge2vertex[e2];
                if (r1.size() < 2 || r2.size() < 2) continue;
                const bool same = (r1[0] == r2[0] && r1[1] == r2[1]) ||
                                  (r1[0] == r2[1] && r1[1] == r2[0]);
                if (!same) continue;
                collapse_duplicate(m, t, std::min(e1, e2), std::max(e1, e2));
                if (report) report->collapsed_edges++;
                changed = true;
            }
        }
    }

    // The survivor inherits any periodic pairing; the dead node is unhooked
    // now so commit() does not sever the inherited link.
    if (m.nodes[fn].pair_up < 0 && m.nodes[dn].pair_up >= 0) {
        const int p = m.nodes[dn].pair_up;
        m.nodes[fn].pair_up = p;
        m.nodes[p].pair_down = fn;
        m.nodes[dn].pair_up = -1;
    }
    if (m.nodes[fn].pair_down < 0 && m.nodes[dn].pair_down >= 0) {
        const int p = m.nodes[dn].pair_down;
        m.nodes[fn].pair_down = p;
        m.nodes[p].pair_up = fn;
        m.nodes[dn].pair_down = -1;
    }
    if (m.nodes[dn].pair_up >= 0) {
        m.nodes[m.nodes[dn].pair_up].pair_down = -1;
        m.nodes[dn].pair_up = -1;
    }
    if (m.nodes[dn].pair_down >= 0) {
        m.nodes[m.nodes[dn].pair_down].pair_up = -1;
        m.nodes[dn].pair_down = -1;
    }

    m.retire_node(dn);
    if (report) report->merges++;
}

// ---- Labels -------------------------------------------------------------------------

void refresh_labels(Mesh& m) {
    const ConnectivityTables& t = m.cur;
    std::vector<int> host(m.nodes.size(), -1);
    for (int e = 0; e < static_cast<int>(m.edges.size()); ++e) {
        if (!m.edges[e].alive) continue;
        const auto& row = t.edge2vertex[e];
        for (std::size_t idx = 2; idx < row.size(); ++idx) {
            const int w = row[idx];
            if (host[w] >= 0 && host[w] != e)
                throw TopologyError("refresh_labels: node " + std::to_string(w) +
                                    " hangs on edges " + std::to_string(host[w]) +
                                    " and " + std::to_string(e));
            host[w] = e;
        }
    }
    for (int k = 0; k < static_cast<int>(m.nodes.size()); ++k) {
        NodeRecord& n = m.nodes[k];
        if (!n.alive) continue;
        if (host[k] >= 0) {
            if (n.host_edge != host[k]) n.host_lift = Vec2{};
            n.label = NodeLabel::Hanging;
            n.host_edge = host[k];
        } else {
            n.label = NodeLabel::Regular;
            n.host_edge = -1;
            n.host_lift = Vec2{};
        }
    }
}

// ---- Pass-through re-hosting ----------------------------------------------------------

namespace {

/// Carry a hanging node whose slide exited its host span onto the collinear
/// edge continuing the chain past `end`. On a seam interface the chain may
/// continue at `end`'s periodic image, and the window lift is recomputed by
/// containment, so wrapped images pass through each other instead of fusing
/// across window frames. Returns false at a genuine interface end.
bool rehost_past_end(Mesh& m, int k, int end) {
    NodeRecord& n = m.nodes[k];
    const int e = n.host_edge;
    if (e < 0 || !edge_usable(m, e)) return false;
    const auto ends = m.edge_endpoints(m.cur, e);
    const Vec2 a_old = m.nodes[ends[0]].coords_old;
    const Vec2 b_old = m.nodes[ends[1]].coords_old;
    const Vec2 a = m.nodes[ends[0]].coords_new;
    const Vec2 b = m.nodes[ends[1]].coords_new;
    const Scalar len_old = (b_old - a_old).norm();
    const Scalar len = (b - a).norm();
    if (!(len_old > 0.0) || !(len > 0.0)) return false;
    const Vec2 dir_old = (b_old - a_old) / len_old;
    const Vec2 dir = (b - a) / len;
    const std::array<ConnectivityTables*, 2> buffers{&m.cur, &m.next};

    // Side of the interface line an element sits on, reduced into the window.
    auto elem_side = [&](int i) -> int {
        Vec2 d = m.element_barycenter(m.cur, i, 0) - a_old;
        if (m.period_y > 0.0)
            d.y -= m.period_y * static_cast<Scalar>(std::llround(d.y / m.period_y));
        const Scalar c = dir_old.cross(d);
        return c > 0.0 ? 1 : (c < 0.0 ? -1 : 0);
    };
    int host_side = 0;
    for (const EdgeOwner& o : m.edge_owners(m.cur, e)) host_side = elem_side(o.elem);
    if (host_side == 0) return false;

    const Scalar sw0 = line_param(n.coords_new, a, dir);
    const Scalar sshift =
        m.period_y > 0.0 ? line_param(n.coords_new + Vec2{0.0, m.period_y}, a, dir) - sw0
                         : 0.0;

    const std::array<int, 3> anchors{end, m.nodes[end].pair_up, m.nodes[end].pair_down};
    for (int u : anchors) {
        if (!node_usable(m, u)) continue;
        for (int g : m.cur.vertex2edge[u]) {
            if (g == e || !edge_usable(m, g)) continue;
            const auto& grow = m.cur.edge2vertex[g];
            if (grow.size() < 2 || (grow[0] != u && grow[1] != u)) continue;
            if (!collinear(a_old, a_old + dir_old, m.nodes[grow[0]].coords_old, kLineTol) ||
                !collinear(a_old, a_old + dir_old, m.nodes[grow[1]].coords_old, kLineTol))
                continue;
            bool same_side = true;
            for (const EdgeOwner& o : m.edge_owners(m.cur, g))
                if (elem_side(o.elem) != host_side) same_side = false;
            if (!same_side) continue;
            const Scalar sa = line_param(m.nodes[grow[0]].coords_new, a, dir);
            const Scalar sb = line_param(m.nodes[grow[1]].coords_new, a, dir);
            const Scalar lo = std::min(sa, sb);
            const Scalar hi = std::max(sa, sb);
            Vec2 lift = n.host_lift;
            Scalar sw = sw0;
            if (sshift != 0.0) {
                const auto wind = std::llround((0.5 * (lo + hi) - sw0) / sshift);
                lift = Vec2{0.0, static_cast<Scalar>(wind) * m.period_y};
                sw = sw0 + static_cast<Scalar>(wind) * sshift;
            }
            // The node sits essentially at the shared span end, so containment
            // is lenient here where seeding is strict.
            const Scalar margin = kSeedTol * (hi - lo);
            if (!(sw > lo - margin && sw < hi + margin)) continue;
            for (ConnectivityTables* t : buffers) {
                erase_value(t->edge2vertex[e], k);
                t->edge2vertex[g].push_back(k);
                erase_value(t->vertex2edge[k], e);
                push_unique(t->vertex2edge[k], g);
            }
            n.host_edge = g;
            n.host_lift = lift;
            // The new host overlaps the node's own-side elements, exactly as
            // at seeding time.
            for (int h : m.cur.vertex2edge[k]) {
                if (h == g || !edge_usable(m, h)) continue;
                const auto& hrow = m.cur.edge2vertex[h];
                if (hrow.size() < 2 || (hrow[0] != k && hrow[1] != k)) continue;
                if (!collinear(a_old, a_old + dir_old, m.nodes[hrow[0]].coords_old,
                               kLineTol) ||
                    !collinear(a_old, a_old + dir_old, m.nodes[hrow[1]].coords_old,
                               kLineTol))
                    continue;
                for (const EdgeOwner& o : m.edge_owners(m.cur, h))
                    for (ConnectivityTables* t : buffers) push_unique(t->edge2elem[g], o.elem);
            }
            return true;
        }
    }
    return false;
}

/// Release a hanging node whose chain ran out of opposite spans: it leaves
/// its host listing and becomes a regular corner again.
void unseed_hanging(Mesh& m, int k) {
    NodeRecord& n = m.nodes[k];
    if (n.host_edge >= 0) {
        const std::array<ConnectivityTables*, 2> buffers{&m.cur, &m.next};
        for (ConnectivityTables* t : buffers) {
            erase_value(t->edge2vertex[n.host_edge], k);
            erase_value(t->vertex2edge[k], n.host_edge);
        }
    }
    n.label = NodeLabel::Regular;
    n.host_edge = -1;
    n.host_lift = Vec2{};
}

/// True when `u` continues its interface chain on both sides along the line:
/// collinear incident edges run above and below it, counting continuations
/// through a periodic partner. Chain-end nodes return false; moving them
/// along the line would reshape their column.
bool interior_on_line(const Mesh& m, int u, const Vec2& anchor, const Vec2& dir) {
    bool below = false;
    bool above = false;
    auto scan = [&](int v, const Vec2& off) {
        const Scalar sv = line_param(m.nodes[v].coords_new + off, anchor, dir);
        for (int g : m.cur.vertex2edge[v]) {
            if (!edge_usable(m, g)) continue;
            const auto& row = m.cur.edge2vertex[g];
            if (row.size() < 2 || (row[0] != v && row[1] != v)) continue;
            const int far = row[0] == v ? row[1] : row[0];
            const Vec2 xf = m.nodes[far].coords_new + off;
            if (!collinear(anchor, anchor + dir, xf, kLineTol)) continue;
            (line_param(xf, anchor, dir) > sv ? above : below) = true;
        }
    };
    scan(u, Vec2{});
    for (int w = 0; w < 2; ++w) {
        const int p = w == 0 ? m.nodes[u].pair_up : m.nodes[u].pair_down;
        if (p >= 0 && node_usable(m, p))
            scan(p, m.nodes[u].coords_new - m.nodes[p].coords_new);
    }
    return below && above;
}

}  // namespace

// ---- Step sequencer -----------------------------------------------------------------

MotionReport advance_nodes(Mesh& m, const InterfaceMarking& marking,
                           const NodeMotionField& field, Scalar dt,
                           const MotionBounds& bounds, bool eulerian) {
    MotionReport rep;
    const int nn0 = static_cast<int>(m.nodes.size());
    for (int k = 0; k < nn0; ++k)
        if (m.nodes[k].alive) m.nodes[k].coords_new = m.nodes[k].coords_old;
    if (eulerian) return rep;
    if (!(dt > 0.0)) throw ConfigError("advance_nodes: dt must be positive");
    const int nelem = static_cast<int>(m.elems.size());
    if (static_cast<int>(field.velocity.size()) < nelem ||
        static_cast<int>(field.mass.size()) < nelem)
        throw ConfigError("advance_nodes: motion field does not cover every element");

    std::unordered_map<int, int> split_slot;
    for (int i = 0; i < static_cast<int>(marking.nodes_to_double.size()); ++i)
        split_slot[marking.nodes_to_double[i]] = i;

    std::vector<char> was_hanging(nn0, 0);
    for (int k = 0; k < nn0; ++k)
        was_hanging[k] =
            (m.nodes[k].alive && m.nodes[k].label == NodeLabel::Hanging) ? 1 : 0;

    auto clamp = [&bounds](Vec2 v, unsigned sides) {
        if (((sides & kSideXMin) && bounds.wall_x_min) ||
            ((sides & kSideXMax) && bounds.wall_x_max))
            v.x = 0.0;
        if (((sides & kSideYMin) && bounds.wall_y_min) ||
            ((sides & kSideYMax) && bounds.wall_y_max))
            v.y = 0.0;
        return v;
    };
    auto partner_of = [&m](int k) {
        const int p = std::max(m.nodes[k].pair_up, m.nodes[k].pair_down);
        return (p >= 0 && m.nodes[p].alive && !m.nodes[p].pending_dead) ? p : -1;
    };
    // Seam images must tile bitwise: the upper image always equals the lower
    // one plus exactly one period. A downward pin therefore re-derives the
    // bottom first and rebuilds the top from it (floating-point addition does
    // not invert subtraction), shifting the authoritative member by at most
    // one ulp.
    auto pin_image = [&m](int base, int p, bool up) {
        const Vec2 period{0.0, m.period_y};
        if (up) {
            m.nodes[p].coords_new = m.nodes[base].coords_new + period;
        } else {
            m.nodes[p].coords_new = m.nodes[base].coords_new - period;
            m.nodes[base].coords_new = m.nodes[p].coords_new + period;
        }
    };

    std::vector<char> done(nn0, 0);

    // Which side of the interface line through a node all of its elements
    // lie on: +1 left, -1 right, 0 straddling or empty (matches the
    // detector's side convention).
    auto one_sided = [&m](int k, const Vec2& dir) {
        int sign = 0;
        const Vec2 xk = m.nodes[k].coords_old;
        for (int i : m.cur.vertex2elem[k]) {
            const Scalar c = dir.cross(m.element_barycenter(m.cur, i, 0) - xk);
            if (c > 0.0) {
                if (sign < 0) return 0;
                sign = +1;
            } else if (c < 0.0) {
                if (sign > 0) return 0;
                sign = -1;
            }
        }
        return sign;
    };

    // ---- Pass 1: plain moves and interface splits, ascending node id ----
    // Periodic partners are handled jointly at the first one visited: one
    // displacement from the combined stencil, rebuilt for the partners as
    // base + exact period offset. A welded seam junction carries partners in
    // both directions; each one is pinned or split on its own side. A marked
    // node owns its pair: an unmarked node whose partner is queued for
    // splitting defers to the partner's turn.
    for (int k = 0; k < nn0; ++k) {
        if (!m.nodes[k].alive || done[k] || was_hanging[k]) continue;
        std::array<int, 2> prt{m.nodes[k].pair_up, m.nodes[k].pair_down};
        if (prt[1] == prt[0]) prt[1] = -1;
        for (int& p : prt)
            if (!(p >= 0 && p < nn0 && !done[p] && !was_hanging[p] && node_usable(m, p)))
                p = -1;
        const auto it = split_slot.find(k);
        if (it == split_slot.end()) {
            bool defer = false;
            for (int p : prt)
                if (p >= 0 && split_slot.count(p)) defer = true;
            if (defer) continue;
        }
        done[k] = 1;
        if (it != split_slot.end()) {
            const int slot = it->second;
            const Vec2 dir = marking.interface_dir[slot];
            std::vector<int> stencil_left = marking.side_left[slot];
            std::vector<int> stencil_right = marking.side_right[slot];
            std::array<int, 2> pslot{-1, -1};
            std::array<int, 2> pside{0, 0};
            for (int w = 0; w < 2; ++w) {
                const int p = prt[w];
                if (p < 0) continue;
                const auto pit = split_slot.find(p);
                if (pit != split_slot.end()) {
                    pslot[w] = pit->second;
                    for (int i : marking.side_left[pslot[w]]) push_unique(stencil_left, i);
                    for (int i : marking.side_right[pslot[w]]) push_unique(stencil_right, i);
                } else {
                    // A one-sided partner mirrors one of the copies: its
                    // elements join that side's stencil.
                    pside[w] = one_sided(p, dir);
                    auto& st = pside[w] < 0 ? stencil_right : stencil_left;
                    for (int i : m.cur.vertex2elem[p]) push_unique(st, i);
                }
            }
            const Vec2 vl = clamp(cheng_shu_velocity(field, stencil_left), m.nodes[k].sides);
            const Vec2 vr = clamp(cheng_shu_velocity(field, stencil_right), m.nodes[k].sides);
            const Vec2 dl = vl * dt;
            const Vec2 dr = vr * dt;
            const int knew = split_node(m, k, marking.side_left[slot],
                                        marking.side_right[slot], dl, dr, dir);
            ++rep.splits;
            // Down partners first: their pin may settle the base by one ulp
            // before the up partner is rebuilt from it.
            for (int w : {1, 0}) {
                const int p = prt[w];
                if (p < 0) continue;
                done[p] = 1;
                const bool up = (w == 0);
                if (pslot[w] >= 0) {
                    const int pnew = split_node(m, p, marking.side_left[pslot[w]],
                                                marking.side_right[pslot[w]], dl, dr, dir);
                    ++rep.splits;
                    if (up) {
                        m.nodes[knew].pair_up = pnew;
                        m.nodes[pnew].pair_down = knew;
                    } else {
                        m.nodes[knew].pair_down = pnew;
                        m.nodes[pnew].pair_up = knew;
                    }
                    pin_image(k, p, up);
                    pin_image(knew, pnew, up);
                } else if (pside[w] < 0) {
                    // The partner mirrors the right copy: move the pairing
                    // over to it and pin the position.
                    ++rep.moved;
                    if (up) {
                        m.nodes[k].pair_up = -1;
                        m.nodes[knew].pair_up = p;
                        m.nodes[p].pair_down = knew;
                    } else {
                        m.nodes[k].pair_down = -1;
                        m.nodes[knew].pair_down = p;
                        m.nodes[p].pair_up = knew;
                    }
                    pin_image(knew, p, up);
                } else {
                    ++rep.moved;
                    pin_image(k, p, up);
                }
            }
        } else {
            std::vector<int> stencil = m.cur.vertex2elem[k];
            for (int p : prt)
                if (p >= 0)
                    for (int i : m.cur.vertex2elem[p]) push_unique(stencil, i);
            const Vec2 v = clamp(cheng_shu_velocity(field, stencil), m.nodes[k].sides);
            const Vec2 d = v * dt;
            m.nodes[k].coords_new = m.nodes[k].coords_old + d;
            ++rep.moved;
            for (int w : {1, 0}) {
                const int p = prt[w];
                if (p < 0) continue;
                pin_image(k, p, w == 0);
                done[p] = 1;
                ++rep.moved;
            }
        }
    }

    // ---- Pass 2: hanging nodes slide along their hosts -------------------
    // Their element lists are one-sided by construction, so the average is
    // the side's own velocity; the host projection keeps them on the line.
    struct Flag {
        int a, b;
    };
    std::vector<Flag> queue;
    for (int k = 0; k < nn0; ++k) {
        if (!m.nodes[k].alive || done[k] || !was_hanging[k]) continue;
        done[k] = 1;
        const int p0 = partner_of(k);
        const int p = (p0 >= 0 && p0 < nn0 && !done[p0] && was_hanging[p0]) ? p0 : -1;
        std::vector<int> stencil = m.cur.vertex2elem[k];
        if (p >= 0)
            for (int i : m.cur.vertex2elem[p]) push_unique(stencil, i);
        const Vec2 v = clamp(cheng_shu_velocity(field, stencil), m.nodes[k].sides);
        const Vec2 raw = m.nodes[k].coords_old + v * dt;
        const SlideOutcome out = slide_hanging_node(m, k, raw);
        ++rep.slides;
        if (out.merge) {
            const bool lifted =
                m.nodes[k].host_lift.x != 0.0 || m.nodes[k].host_lift.y != 0.0;
            if (lifted) {
                if (!rehost_past_end(m, k, out.merge_with)) unseed_hanging(m, k);
            } else {
                // Weld only when the touch point is interior to at least one
                // chain; two crossing chain ends slide past without welding
                // and the rider is released at the last span.
                const auto hends = m.edge_endpoints(m.cur, m.nodes[k].host_edge);
                const Vec2 ha = m.nodes[hends[0]].coords_new;
                const Vec2 hb = m.nodes[hends[1]].coords_new;
                const Vec2 hdir = (hb - ha) / (hb - ha).norm();
                if (interior_on_line(m, k, ha, hdir) ||
                    interior_on_line(m, out.merge_with, ha, hdir))
                    queue.push_back({k, out.merge_with});
                else if (!rehost_past_end(m, k, out.merge_with))
                    unseed_hanging(m, k);
            }
        }
        if (p < 0 && m.period_y > 0.0) {
            // Regular partners already placed in pass 1: the slid position is
            // authoritative for the pair, so rebuild them from it.
            for (int w : {1, 0}) {
                const int q = w == 0 ? m.nodes[k].pair_up : m.nodes[k].pair_down;
                if (q < 0 || !node_usable(m, q)) continue;
                if (q < nn0 && was_hanging[q]) continue;
                pin_image(k, q, w == 0);
            }
        }
        if (p >= 0) {
            // The partner takes the base position shifted by exactly one
            // period (seam interfaces share the interface line, so the
            // shifted point already lies on the partner's host), then runs
            // its own span check.
            NodeRecord& pn = m.nodes[p];
            pin_image(k, p, m.nodes[k].pair_up == p);
            ++rep.slides;
            done[p] = 1;
            const int he = pn.host_edge;
            if (he >= 0 && edge_usable(m, he)) {
                const auto ends = m.edge_endpoints(m.cur, he);
                const Vec2 a = m.nodes[ends[0]].coords_new;
                const Vec2 b = m.nodes[ends[1]].coords_new;
                const Scalar len = (b - a).norm();
                if (len > 0.0) {
                    const Scalar s =
                        line_param(pn.coords_new + pn.host_lift, a, (b - a) / len);
                    if (s < 0.0 || s > len) {
                        const int pend = s < 0.0 ? ends[0] : ends[1];
                        const bool lifted =
                            pn.host_lift.x != 0.0 || pn.host_lift.y != 0.0;
                        if (lifted) {
                            if (!rehost_past_end(m, p, pend)) unseed_hanging(m, p);
                        } else {
                            const Vec2 hdir = (b - a) / len;
                            if (interior_on_line(m, p, a, hdir) ||
                                interior_on_line(m, pend, a, hdir))
                                queue.push_back({p, pend});
                            else if (!rehost_past_end(m, p, pend))
                                unseed_hanging(m, p);
                        }
                    }
                }
            }
        }
    }

    // ---- Pass 3: proximity scan along every nonconforming edge -----------
    // A node chain pair fuses when it closes to within a fraction of the
    // shortest adjacent interface edge. Pairs that are receding (fresh
    // copies from this or earlier splits) are never fused, and neither are
    // the two endpoints of a live edge (that would collapse an element).
    const ConnectivityTables& t = m.cur;
    auto interface_length_near = [&](int u) -> Scalar {
        Scalar best = std::numeric_limits<Scalar>::infinity();
        for (int e : t.vertex2edge[u]) {
            if (!edge_usable(m, e)) continue;
            if (m.edges[e].boundary != kEdgeInterior) continue;
            const auto& row = t.edge2vertex[e];
            if (row.size() < 2 || (row[0] != u && row[1] != u)) continue;
            if (m.edge_owners(t, e).size() != 1) continue;
            const Vec2 d = m.nodes[row[1]].coords_new - m.nodes[row[0]].coords_new;
            best = std::min(best, d.norm());
        }
        return best;
    };
    const int ne = static_cast<int>(m.edges.size());
    for (int e = 0; e < ne; ++e) {
        if (!edge_usable(m, e)) continue;
        const auto& row = t.edge2vertex[e];
        if (row.size() <= 2) continue;
        const std::array<int, 2> ends{row[0], row[1]};
        const Vec2 ea = m.nodes[ends[0]].coords_new;
        const Vec2 eb = m.nodes[ends[1]].coords_new;
        const Scalar elen = (eb - ea).norm();
        if (!(elen > 0.0)) continue;
        const Vec2 edir = (eb - ea) / elen;
        for (std::size_t idx = 2; idx < row.size(); ++idx) {
            const int w = row[idx];
            const Vec2 lift = (m.nodes[w].host_edge == e) ? m.nodes[w].host_lift : Vec2{};
            // A wrapped image never fuses: its approach to a span end becomes
            // a pass-through handled by re-hosting in the slide pass.
            if (lift.x != 0.0 || lift.y != 0.0) continue;
            for (int ep : ends) {
                const Scalar dist_new =
                    (m.nodes[w].coords_new + lift - m.nodes[ep].coords_new).norm();
                const Scalar dist_old =
                    (m.nodes[w].coords_old + lift - m.nodes[ep].coords_old).norm();
                if (!(dist_new < dist_old)) continue;
                Scalar ref = std::min(interface_length_near(w), interface_length_near(ep));
                if (!std::isfinite(ref)) {
                    const Vec2 d = m.nodes[ends[1]].coords_new - m.nodes[ends[0]].coords_new;
                    ref = d.norm();
                }
                // Two crossing chain ends never weld: they pass each other
                // and the slide pass releases the rider at its last span.
                if (dist_new < kMergeFraction * ref &&
                    (interior_on_line(m, w, ea, edir) ||
                     interior_on_line(m, ep, ea, edir)))
                    queue.push_back({w, ep});
            }
        }
    }

    // ---- Pass 4: execute the queued fusions -------------------------------
    // Sorted by id so chains always fuse into the smallest id; a union-find
    // map redirects later requests through earlier fusions. Partnered nodes
    // fuse in tandem and the top pair is pinned exactly one period up.
    std::sort(queue.begin(), queue.end(), [](const Flag& l, const Flag& r) {
        const int la = std::min(l.a, l.b), lb = std::max(l.a, l.b);
        const int ra = std::min(r.a, r.b), rb = std::max(r.a, r.b);
        return la != ra ? la < ra : lb < rb;
    });
    std::unordered_map<int, int> parent;
    auto find = [&parent](int x) {
        auto it = parent.find(x);
        while (it != parent.end()) {
            x = it->second;
            it = parent.find(x);
        }
        return x;
    };
    auto edge_joined = [&m](int u, int v) {
        for (int e : m.next.vertex2edge[u]) {
            if (!edge_usable(m, e)) continue;
            const auto& row = m.next.edge2vertex[e];
            if (row.size() >= 2 &&
                ((row[0] == u && row[1] == v) || (row[0] == v && row[1] == u)))
                return true;
        }
        return false;
    };
    for (const Flag& fl : queue) {
        const int ra = find(fl.a);
        const int rb = find(fl.b);
        if (ra == rb) continue;
        if (edge_joined(ra, rb)) continue;
        const int pa = partner_of(ra);
        const int pb = partner_of(rb);
        // The partner images fuse with each other only when they sit on the
        // same side of the seam; a weld of a down-paired node with an
        // up-paired one keeps both partners as one-period mirrors.
        const bool same_side = pa >= 0 && pb >= 0 &&
                               ((m.nodes[ra].pair_up == pa) == (m.nodes[rb].pair_up == pb));
        // Area-exact welding: a chain-end node must not leave its spot, so
        // the fused point sits there when exactly one member is an end; two
        // interior members meet halfway (any motion along the line is free).
        const int hang =
            m.nodes[ra].label == NodeLabel::Hanging && edge_usable(m, m.nodes[ra].host_edge)
                ? ra
                : (m.nodes[rb].label == NodeLabel::Hanging &&
                           edge_usable(m, m.nodes[rb].host_edge)
                       ? rb
                       : -1);
        if (hang >= 0) {
            const auto hends = m.edge_endpoints(m.cur, m.nodes[hang].host_edge);
            const Vec2 ha = m.nodes[hends[0]].coords_new;
            const Vec2 hb = m.nodes[hends[1]].coords_new;
            const Scalar hlen = (hb - ha).norm();
            if (hlen > 0.0) {
                const Vec2 hdir = (hb - ha) / hlen;
                const bool ia = interior_on_line(m, ra, ha, hdir);
                const bool ib = interior_on_line(m, rb, ha, hdir);
                if (ia != ib) {
                    const Vec2 pin = m.nodes[ia ? rb : ra].coords_new;
                    m.nodes[ra].coords_new = pin;
                    m.nodes[rb].coords_new = pin;
                }
            }
        }
        merge_nodes(m, ra, rb, &rep);
        parent[std::max(ra, rb)] = std::min(ra, rb);
        if (same_side && m.period_y > 0.0) {
            const int qa = find(pa);
            const int qb = find(pb);
            if (qa != qb && !edge_joined(qa, qb)) {
                merge_nodes(m, qa, qb, &rep);
                parent[std::max(qa, qb)] = std::min(qa, qb);
            }
            const int base = std::min(ra, rb);
            const int mate = find(std::min(qa, qb));
            if (mate != base) {
                const bool base_bottom = (m.nodes[base].pair_up >= 0);
                const int bottom = base_bottom ? base : mate;
                const int top = base_bottom ? mate : base;
                const int top_dn = base_bottom ? std::max(qa, qb) : std::max(ra, rb);
                const Vec2 want = m.nodes[bottom].coords_new + Vec2{0.0, m.period_y};
                m.nodes[top].coords_new = want;
                if (top_dn != top) m.nodes[top_dn].coords_new = want;
            }
        } else if ((pa >= 0 || pb >= 0) && m.period_y > 0.0) {
            // Every remaining partner of the fused point is its mirror and
            // follows it to exactly one period away, else the boundary
            // chains stop tiling.
            const int base = std::min(ra, rb);
            for (int w : {1, 0}) {
                const int q0 = w == 0 ? m.nodes[base].pair_up : m.nodes[base].pair_down;
                if (q0 < 0) continue;
                const int q = find(q0);
                if (q == base || !node_usable(m, q)) continue;
                pin_image(base, q, w == 0);
            }
            // The retired twin keeps describing the same end-of-step point.
            m.nodes[std::max(ra, rb)].coords_new = m.nodes[base].coords_new;
        }
    }

    // Re-route surviving periodic pointers through the fusions.
    if (!parent.empty()) {
        for (int k = 0; k < static_cast<int>(m.nodes.size()); ++k) {
            NodeRecord& n = m.nodes[k];
            if (!n.alive || n.pending_dead) continue;
            if (n.pair_up >= 0) {
                const int r = find(n.pair_up);
                if (r != n.pair_up) {
                    n.pair_up = r;
                    m.nodes[r].pair_down = k;
                }
            }
            if (n.pair_down >= 0) {
                const int r = find(n.pair_down);
                if (r != n.pair_down) {
                    n.pair_down = r;
                    m.nodes[r].pair_up = k;
                }
            }
        }
    }
    return rep;
}

}  // namespace alefv
