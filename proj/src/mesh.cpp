/// @file mesh.cpp
/// @brief Mesh generation, table maintenance, validation, and dump.

#include "alefv/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <ostream>
#include <sstream>

#include "alefv/geometry.hpp"

namespace alefv {

namespace {

/// Build edges and the derived tables from completed tri rows.
void build_edges_from_elements(Mesh& m) {
    ConnectivityTables& t = m.cur;
    const int n_elems = static_cast<int>(t.tri.size());
    t.elem2edge.assign(n_elems, {});
    std::map<std::pair<int, int>, int> edge_of;  // (min,max) endpoint key

    for (int i = 0; i < n_elems; ++i) {
        const auto& loop = t.tri[i];
        const int nv = static_cast<int>(loop.size());
        for (int k = 0; k < nv; ++k) {
            const int a = loop[k];
            const int b = loop[(k + 1) % nv];
            const auto key = std::minmax(a, b);
            auto it = edge_of.find(key);
            int e;
            if (it == edge_of.end()) {
                e = static_cast<int>(m.edges.size());
                m.edges.push_back({});
                m.edges[e].alive = true;
                t.edge2vertex.push_back({a, b});
                t.edge2elem.push_back({});
                edge_of.emplace(key, e);
            } else {
                e = it->second;
            }
            t.elem2edge[i].push_back(e);
            t.edge2elem[e].push_back(i);
        }
    }

    // Vertex-indexed tables.
    t.vertex2edge.assign(m.nodes.size(), {});
    t.vertex2elem.assign(m.nodes.size(), {});
    for (int e = 0; e < static_cast<int>(t.edge2vertex.size()); ++e) {
        for (int k : t.edge2vertex[e]) t.vertex2edge[k].push_back(e);
    }
    for (int i = 0; i < n_elems; ++i) {
        for (int k : t.tri[i]) t.vertex2elem[k].push_back(i);
    }
}

/// Tag boundary edges/nodes by comparing against the domain box.
void tag_boundaries(Mesh& m) {
    const Scalar tol = 1e-12 * std::max(m.domain_hi.x - m.domain_lo.x,
                                        m.domain_hi.y - m.domain_lo.y);
    auto node_sides = [&](const Vec2& p) {
        unsigned s = 0;
        if (std::abs(p.x - m.domain_lo.x) <= tol) s |= kSideXMin;
        if (std::abs(p.x - m.domain_hi.x) <= tol) s |= kSideXMax;
        if (std::abs(p.y - m.domain_lo.y) <= tol) s |= kSideYMin;
        if (std::abs(p.y - m.domain_hi.y) <= tol) s |= kSideYMax;
        return s;
    };
    for (auto& n : m.nodes) {
        if (n.alive) n.sides = node_sides(n.coords_old);
    }
    for (int e = 0; e < static_cast<int>(m.edges.size()); ++e) {
        if (m.cur.edge2elem[e].size() != 1) continue;  // interior
        const auto ends = m.edge_endpoints(m.cur, e);
        const unsigned both = m.nodes[ends[0]].sides & m.nodes[ends[1]].sides;
        if (both & kSideXMin) m.edges[e].boundary = kEdgeXMin;
        else if (both & kSideXMax) m.edges[e].boundary = kEdgeXMax;
        else if (both & kSideYMin) m.edges[e].boundary = kEdgeYMin;
        else if (both & kSideYMax) m.edges[e].boundary = kEdgeYMax;
        else throw TopologyError("generate: single-owner edge off the domain boundary");
    }
}

}  // namespace

// ---- Generation -----------------------------------------------------------------

Mesh Mesh::generate_rect(const Vec2& lo, const Vec2& hi, int nx, int ny,
                         MeshKind kind) {
    if (nx < 1 || ny < 1) {
        throw ConfigError("generate_rect: resolutions must be positive");
    }
    if (!(hi.x > lo.x) || !(hi.y > lo.y)) {
        throw ConfigError("generate_rect: empty domain");
    }
    Mesh m;
    m.domain_lo = lo;
    m.domain_hi = hi;

    const Scalar w = hi.x - lo.x;
    const Scalar h = hi.y - lo.y;
    // Coordinates are a pure function of the lattice index so that every row
    // shares bitwise-identical x (and every column identical y).
    auto px = [&](int i) { return i == nx ? hi.x : lo.x + w * (static_cast<Scalar>(i) / nx); };
    auto py = [&](int j) { return j == ny ? hi.y : lo.y + h * (static_cast<Scalar>(j) / ny); };

    auto add_node = [&](Scalar x, Scalar y) {
        NodeRecord n;
        n.coords_old = n.coords_new = {x, y};
        n.alive = true;
        m.nodes.push_back(n);
        return static_cast<int>(m.nodes.size()) - 1;
    };

    std::vector<int> grid((nx + 1) * (ny + 1));
    for (int j = 0; j <= ny; ++j) {
        for (int i = 0; i <= nx; ++i) grid[j * (nx + 1) + i] = add_node(px(i), py(j));
    }
    auto at = [&](int i, int j) { return grid[j * (nx + 1) + i]; };

    auto add_elem = [&](std::vector<int> loop) {
        m.cur.tri.push_back(std::move(loop));
        m.elems.push_back({});
        m.elems.back().alive = true;
    };

    for (int j = 0; j < ny; ++j) {
        for (int i = 0; i < nx; ++i) {
            const int a = at(i, j), b = at(i + 1, j), c = at(i + 1, j + 1), d = at(i, j + 1);
            const bool as_quad =
                kind == MeshKind::Quads || (kind == MeshKind::Mixed && (i + j) % 2 == 0);
            if (as_quad) {
                add_elem({a, b, c, d});
            } else if (kind == MeshKind::CrissCross) {
                const int o = add_node(lo.x + w * ((i + 0.5) / nx),
                                       lo.y + h * ((j + 0.5) / ny));
                add_elem({a, b, o});
                add_elem({b, c, o});
                add_elem({c, d, o});
                add_elem({d, a, o});
            } else {
                add_elem({a, b, c});
                add_elem({a, c, d});
            }
        }
    }

    build_edges_from_elements(m);
    tag_boundaries(m);
    m.next = m.cur;
    return m;
}

void Mesh::make_periodic_y() {
    period_y = domain_hi.y - domain_lo.y;
    std::vector<int> bottom, top;
    for (int k = 0; k < static_cast<int>(nodes.size()); ++k) {
        if (!nodes[k].alive) continue;
        if (nodes[k].sides & kSideYMin) bottom.push_back(k);
        if (nodes[k].sides & kSideYMax) top.push_back(k);
    }
    if (bottom.size() != top.size()) {
        throw TopologyError("make_periodic_y: boundary node counts differ");
    }
    const Scalar tol = 1e-9 * (domain_hi.x - domain_lo.x);
    for (int b : bottom) {
        int match = -1;
        for (int t : top) {
            if (std::abs(nodes[t].coords_old.x - nodes[b].coords_old.x) <= tol) {
                match = t;
                break;
            }
        }
        if (match < 0) throw TopologyError("make_periodic_y: unmatched boundary node");
        nodes[b].pair_up = match;
        nodes[match].pair_down = b;
        // Identify the pair's coordinates exactly: top = bottom + period.
        nodes[match].coords_old = nodes[b].coords_old + Vec2{0.0, period_y};
        nodes[match].coords_new = nodes[match].coords_old;
    }
}

// ---- Index allocation ---------------------------------------------------------------

void Mesh::ensure_node_rows(int k) {
    const auto n = static_cast<std::size_t>(k) + 1;
    if (nodes.size() < n) nodes.resize(n);
    for (ConnectivityTables* t : {&cur, &next}) {
        if (t->vertex2edge.size() < n) t->vertex2edge.resize(n);
        if (t->vertex2elem.size() < n) t->vertex2elem.resize(n);
    }
}

void Mesh::ensure_edge_rows(int e) {
    const auto n = static_cast<std::size_t>(e) + 1;
    if (edges.size() < n) edges.resize(n);
    for (ConnectivityTables* t : {&cur, &next}) {
        if (t->edge2vertex.size() < n) t->edge2vertex.resize(n);
        if (t->edge2elem.size() < n) t->edge2elem.resize(n);
    }
}

int Mesh::allocate_node() {
    int k;
    if (!free_nodes_.empty()) {
        k = *free_nodes_.begin();
        free_nodes_.erase(free_nodes_.begin());
    } else {
        k = static_cast<int>(nodes.size());
    }
    ensure_node_rows(k);
    nodes[k] = NodeRecord{};
    nodes[k].alive = true;
    return k;
}

int Mesh::allocate_edge() {
    int e;
    if (!free_edges_.empty()) {
        e = *free_edges_.begin();
        free_edges_.erase(free_edges_.begin());
    } else {
        e = static_cast<int>(edges.size());
    }
    ensure_edge_rows(e);
    edges[e] = EdgeRecord{};
    edges[e].alive = true;
    return e;
}

void Mesh::retire_node(int k) {
    nodes[k].pending_dead = true;
    retiring_nodes_.push_back(k);
}

void Mesh::retire_edge(int e) {
    edges[e].pending_dead = true;
    retiring_edges_.push_back(e);
}

// ---- Step lifecycle ----------------------------------------------------------------

void Mesh::commit() {
    cur = next;
    for (auto& n : nodes) {
        if (n.alive) n.coords_old = n.coords_new;
    }
    for (int k : retiring_nodes_) {
        // Unhook periodic partners before the id is recycled.
        if (nodes[k].pair_up >= 0) nodes[nodes[k].pair_up].pair_down = -1;
        if (nodes[k].pair_down >= 0) nodes[nodes[k].pair_down].pair_up = -1;
        nodes[k] = NodeRecord{};
        nodes[k].label = NodeLabel::Dead;
        free_nodes_.insert(k);
    }
    for (int e : retiring_edges_) {
        edges[e] = EdgeRecord{};
        free_edges_.insert(e);
    }
    retiring_nodes_.clear();
    retiring_edges_.clear();
}

// ---- Queries ---------------------------------------------------------------------------

int Mesh::num_live_nodes() const {
    int n = 0;
    for (const auto& r : nodes) n += r.alive ? 1 : 0;
    return n;
}

int Mesh::num_live_edges() const {
    int n = 0;
    for (const auto& r : edges) n += r.alive ? 1 : 0;
    return n;
}

int Mesh::num_live_elems() const {
    int n = 0;
    for (const auto& r : elems) n += r.alive ? 1 : 0;
    return n;
}

std::array<int, 2> Mesh::edge_endpoints(const ConnectivityTables& t, int e) const {
    const auto& row = t.edge2vertex[e];
    if (row.size() < 2) {
        throw TopologyError("edge " + std::to_string(e) + " has fewer than 2 nodes");
    }
    return {row[0], row[1]};
}

std::vector<EdgeOwner> Mesh::edge_owners(const ConnectivityTables& t, int e) const {
    std::vector<EdgeOwner> owners;
    const auto ends = edge_endpoints(t, e);
    for (int i : t.edge2elem[e]) {
        const auto& ee = t.elem2edge[i];
        const auto pos = std::find(ee.begin(), ee.end(), e);
        if (pos == ee.end()) continue;  // overlap-side neighbor, not an owner
        const int k = static_cast<int>(pos - ee.begin());
        const auto& loop = t.tri[i];
        EdgeOwner o;
        o.elem = i;
        o.forward = loop[k] == ends[0];
        owners.push_back(o);
    }
    return owners;
}

std::vector<Vec2> Mesh::element_polygon(const ConnectivityTables& t, int i,
                                        int level) const {
    std::vector<Vec2> poly;
    poly.reserve(t.tri[i].size());
    for (int k : t.tri[i]) poly.push_back(coords(k, level));
    return poly;
}

Scalar Mesh::element_area(const ConnectivityTables& t, int i, int level) const {
    return polygon_signed_area(element_polygon(t, i, level));
}

Vec2 Mesh::element_barycenter(const ConnectivityTables& t, int i, int level) const {
    return polygon_centroid(element_polygon(t, i, level));
}

Scalar Mesh::element_diameter(const ConnectivityTables& t, int i) const {
    const auto poly = element_polygon(t, i, 0);
    return incircle_diameter(polygon_area(poly), polygon_perimeter(poly));
}

// ---- Validation ------------------------------------------------------------------------

std::vector<std::string> Mesh::validate(const ConnectivityTables& t) const {
    std::vector<std::string> bad;
    auto complain = [&](const std::string& msg) { bad.push_back(msg); };
    auto contains = [](const std::vector<int>& row, int v) {
        return std::find(row.begin(), row.end(), v) != row.end();
    };

    // Elements: orientation, liveness of vertices, elem2edge alignment.
    for (int i = 0; i < static_cast<int>(t.tri.size()); ++i) {
        if (!elems[i].alive) {
            if (!t.tri[i].empty()) complain("tri: dead element " + std::to_string(i) + " has a live row");
            continue;
        }
        const auto& loop = t.tri[i];
        if (loop.size() < 3) {
            complain("tri: element " + std::to_string(i) + " has fewer than 3 vertices");
            continue;
        }
        for (int k : loop) {
            if (k < 0 || k >= static_cast<int>(nodes.size()) || !nodes[k].alive) {
                complain("tri: element " + std::to_string(i) + " lists dead node " +
                         std::to_string(k));
            } else if (!contains(t.vertex2elem[k], i)) {
                complain("vertex2elem: node " + std::to_string(k) + " missing element " +
                         std::to_string(i));
            }
        }
        if (polygon_signed_area(element_polygon(t, i, 0)) <= 0.0) {
            complain("tri: element " + std::to_string(i) + " is not counterclockwise");
        }
        const auto& ee = t.elem2edge[i];
        if (ee.size() != loop.size()) {
            complain("elem2edge: element " + std::to_string(i) + " row size mismatch");
        } else {
            for (std::size_t k = 0; k < loop.size(); ++k) {
                const int e = ee[k];
                if (e < 0 || e >= static_cast<int>(edges.size()) || !edges[e].alive) {
                    complain("elem2edge: element " + std::to_string(i) + " lists dead edge " +
                             std::to_string(e));
                    continue;
                }
                const auto ends = edge_endpoints(t, e);
                const int a = loop[k];
                const int b = loop[(k + 1) % loop.size()];
                if (!((ends[0] == a && ends[1] == b) || (ends[0] == b && ends[1] == a))) {
                    complain("elem2edge: element " + std::to_string(i) + " edge " +
                             std::to_string(e) + " does not join loop vertices");
                }
                if (!contains(t.edge2elem[e], i)) {
                    complain("edge2elem: edge " + std::to_string(e) + " missing owner " +
                             std::to_string(i));
                }
            }
        }
    }

    // Edges: endpoint/intermediate structure and vertex2edge consistency.
    for (int e = 0; e < static_cast<int>(t.edge2vertex.size()); ++e) {
        if (!edges[e].alive) {
            if (!t.edge2vertex[e].empty()) complain("edge2vertex: dead edge " + std::to_string(e) + " has a live row");
            continue;
        }
        const auto& row = t.edge2vertex[e];
        if (row.size() < 2) {
            complain("edge2vertex: edge " + std::to_string(e) + " has fewer than 2 nodes");
            continue;
        }
        for (int k : row) {
            if (k < 0 || k >= static_cast<int>(nodes.size()) || !nodes[k].alive) {
                complain("edge2vertex: edge " + std::to_string(e) + " lists dead node " +
                         std::to_string(k));
            } else if (!contains(t.vertex2edge[k], e)) {
                complain("vertex2edge: node " + std::to_string(k) + " missing edge " +
                         std::to_string(e));
            }
        }
        // Intermediates must be hanging on this edge and lie on its segment.
        const Vec2 a0 = nodes[row[0]].coords_old, b0 = nodes[row[1]].coords_old;
        const Vec2 a1 = nodes[row[0]].coords_new, b1 = nodes[row[1]].coords_new;
        for (std::size_t k = 2; k < row.size(); ++k) {
            const NodeRecord& n = nodes[row[k]];
            if (n.label != NodeLabel::Hanging || n.host_edge != e) {
                complain("edge2vertex: intermediate node " + std::to_string(row[k]) +
                         " of edge " + std::to_string(e) + " is not hanging on it");
                continue;
            }
            if (!collinear(a0, b0, n.coords_old + n.host_lift, 1e-9) ||
                !collinear(a1, b1, n.coords_new + n.host_lift, 1e-9)) {
                complain("node " + std::to_string(row[k]) +
                         " does not lie on its host edge " + std::to_string(e));
            }
        }
    }

    // Vertex-indexed rows: reverse inclusion and dead-node isolation.
    for (int k = 0; k < static_cast<int>(t.vertex2edge.size()); ++k) {
        if (!nodes[k].alive) {
            if (!t.vertex2edge[k].empty() || !t.vertex2elem[k].empty()) {
                complain("dead node " + std::to_string(k) + " appears in live rows");
            }
            continue;
        }
        for (int e : t.vertex2edge[k]) {
            if (e < 0 || e >= static_cast<int>(edges.size()) || !edges[e].alive ||
                !contains(t.edge2vertex[e], k)) {
                complain("vertex2edge: node " + std::to_string(k) + " lists edge " +
                         std::to_string(e) + " that does not list it back");
            }
        }
        for (int i : t.vertex2elem[k]) {
            if (i < 0 || i >= static_cast<int>(elems.size()) || !elems[i].alive ||
                !contains(t.tri[i], k)) {
                complain("vertex2elem: node " + std::to_string(k) + " lists element " +
                         std::to_string(i) + " that does not list it back");
            }
        }
    }

    // edge2elem: every entry is either an owner or an overlapping collinear
    // neighbor from the other side of a nonconforming interface.
    for (int e = 0; e < static_cast<int>(t.edge2elem.size()); ++e) {
        if (!edges[e].alive) continue;
        const auto owners = edge_owners(t, e);
        if (owners.empty() || owners.size() > 2) {
            complain("edge " + std::to_string(e) + " has " + std::to_string(owners.size()) +
                     " owners");
        }
        for (int i : t.edge2elem[e]) {
            if (i < 0 || i >= static_cast<int>(elems.size()) || !elems[i].alive) {
                complain("edge2elem: edge " + std::to_string(e) + " lists dead element " +
                         std::to_string(i));
                continue;
            }
            bool is_owner = false;
            for (const auto& o : owners) is_owner |= o.elem == i;
            if (is_owner) continue;
            // Overlap neighbor: must own some edge collinear with e.
            const auto ends = edge_endpoints(t, e);
            const Vec2 a = nodes[ends[0]].coords_old, b = nodes[ends[1]].coords_old;
            bool has_collinear = false;
            for (int f : t.elem2edge[i]) {
                const auto fe = edge_endpoints(t, f);
                Vec2 fa = nodes[fe[0]].coords_old, fb = nodes[fe[1]].coords_old;
                if (period_y > 0.0) {
                    // Allow whole-period lifts across the periodic seam.
                    const Scalar shift =
                        std::round(((a.y + b.y) - (fa.y + fb.y)) / (2.0 * period_y)) * period_y;
                    fa.y += shift;
                    fb.y += shift;
                }
                if (collinear(a, b, fa, 1e-8) && collinear(a, b, fb, 1e-8)) {
                    has_collinear = true;
                    break;
                }
            }
            if (!has_collinear) {
                complain("edge2elem: edge " + std::to_string(e) + " lists element " +
                         std::to_string(i) + " that neither owns nor overlaps it");
            }
        }
    }

    return bad;
}

// ---- Dump ----------------------------------------------------------------------------------

void Mesh::dump(std::ostream& os) const {
    os.precision(17);
    os << "# nodes\n";
    for (int k = 0; k < static_cast<int>(nodes.size()); ++k) {
        const auto& n = nodes[k];
        if (!n.alive) continue;
        os << k << ' ' << n.coords_old.x << ' ' << n.coords_old.y << ' '
           << n.coords_new.x << ' ' << n.coords_new.y << ' ';
        switch (n.label) {
            case NodeLabel::Regular: os << "regular"; break;
            case NodeLabel::Hanging: os << "hanging:" << n.host_edge; break;
            case NodeLabel::Dead: os << "dead"; break;
        }
        os << '\n';
    }
    const auto section = [&](const char* name,
                             const std::vector<std::vector<int>>& table,
                             auto alive_fn) {
        os << "# " << name << '\n';
        for (int r = 0; r < static_cast<int>(table.size()); ++r) {
            if (!alive_fn(r)) continue;
            os << r;
            for (int v : table[r]) os << ' ' << v;
            os << '\n';
        }
    };
    auto elem_alive = [&](int i) { return elems[i].alive; };
    auto edge_alive = [&](int e) { return edges[e].alive; };
    auto node_alive = [&](int k) { return nodes[k].alive; };
    section("tri", cur.tri, elem_alive);
    section("elem2edge", cur.elem2edge, elem_alive);
    section("edge2elem", cur.edge2elem, edge_alive);
    section("edge2vertex", cur.edge2vertex, edge_alive);
    section("vertex2edge", cur.vertex2edge, node_alive);
    section("vertex2elem", cur.vertex2elem, node_alive);
}

}  // namespace alefv
