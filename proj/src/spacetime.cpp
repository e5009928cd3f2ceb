/// @file spacetime.cpp
/// @brief Space-time face construction: bilinear patch measures, interface
///        clustering, the nonconforming line sweep, periodic seam matching,
///        and the closure audit.

#include "alefv/spacetime.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <set>
#include <sstream>

#include "alefv/geometry.hpp"

namespace alefv {

namespace {

/// Relative tolerance for deciding that edges lie on one interface line.
constexpr Scalar kCollinearTol = 1e-10;
/// Relative tolerance for coalescing sweep cut points.
constexpr Scalar kCutDedupeTol = 1e-12;
/// Relative tolerance for span-cover queries along an interface line.
constexpr Scalar kCoverTol = 1e-9;

}  // namespace

// ---- Single-patch geometry ---------------------------------------------------

SubFaceGeometry subface_geometry(const std::array<Vec3, 4>& corners) {
    // The diagonal form 0.5 (X3 - X1) x (X4 - X2) is the exact integral of
    // x_chi x x_tau over the bilinear patch (it equals the midpoint cross
    // product and the two-flat-triangle vector sum), so closed space-time
    // volumes cancel to rounding error.
    const Vec3 d13 = corners[2] - corners[0];
    const Vec3 d24 = corners[3] - corners[1];
    SubFaceGeometry g;
    g.vector_area = 0.5 * d13.cross(d24);
    g.area = g.vector_area.norm();
    if (g.area > 0.0) g.normal = g.vector_area / g.area;
    g.midpoint = (corners[0] + corners[1] + corners[2] + corners[3]) / 4.0;
    return g;
}

namespace {

/// Lateral face of the edge (a -> b) whose left element traverses a -> b in
/// its counterclockwise loop; positions given at both time levels.
SpaceTimeFace lateral_face(const Vec2& a0, const Vec2& b0, const Vec2& b1,
                           const Vec2& a1, Scalar dt) {
    SpaceTimeFace f;
    f.corners = {Vec3{a0.x, a0.y, 0.0}, Vec3{b0.x, b0.y, 0.0},
                 Vec3{b1.x, b1.y, dt}, Vec3{a1.x, a1.y, dt}};
    const SubFaceGeometry g = subface_geometry(f.corners);
    f.area = g.area;
    f.normal = g.normal;
    f.midpoint = g.midpoint;
    f.vector_area = g.vector_area;
    return f;
}

// ---- Sweep scaffolding -----------------------------------------------------

/// One cut point of an interface sweep: a node projected onto the cluster
/// line at both time levels, possibly lifted by a multiple of the period.
struct SweepCut {
    int node = -1;
    Scalar s_old = 0.0;
    Scalar s_new = 0.0;
    Scalar lift = 0.0;   ///< window position = raw position + lift * period
    bool from_top = false;  ///< seam sweep only: sourced from the upper side
};

/// Span of one side's edge along the sweep line at both time levels.
struct SweepCover {
    int edge = -1;
    int elem = -1;
    Scalar lo[2] = {0.0, 0.0};
    Scalar hi[2] = {0.0, 0.0};
    Scalar center = 0.0;  ///< old-level span center, used for period lifts
};

struct CoverHit {
    int edge = -1;
    int elem = -1;
    Scalar lift = 0.0;  ///< element frame = window frame + lift * period in y
};

/// First cover whose span at `level` contains `s`, reducing by the period
/// when `period > 0` (wrapped sweep).
std::optional<CoverHit> find_cover(const std::vector<SweepCover>& covers,
                                   int level, Scalar s, Scalar period,
                                   Scalar tol) {
    for (const SweepCover& c : covers) {
        Scalar k = 0.0;
        if (period > 0.0) k = static_cast<Scalar>(std::llround((s - c.center) / period));
        const Scalar sq = s - k * period;
        if (sq >= c.lo[level] - tol && sq <= c.hi[level] + tol)
            return CoverHit{c.edge, c.elem, -k};
    }
    return std::nullopt;
}

void sort_and_dedupe_cuts(std::vector<SweepCut>& cuts, Scalar tol) {
    std::sort(cuts.begin(), cuts.end(), [](const SweepCut& a, const SweepCut& b) {
        if (a.s_old != b.s_old) return a.s_old < b.s_old;
        if (a.s_new != b.s_new) return a.s_new < b.s_new;
        if (a.from_top != b.from_top) return !a.from_top;
        return a.node < b.node;
    });
    std::vector<SweepCut> unique;
    for (const SweepCut& c : cuts) {
        if (!unique.empty() && std::abs(c.s_old - unique.back().s_old) <= tol &&
            std::abs(c.s_new - unique.back().s_new) <= tol)
            continue;
        unique.push_back(c);
    }
    cuts.swap(unique);
}

}  // namespace

// ---- Interface clusters --------------------------------------------------------

std::vector<InterfaceCluster> find_interface_clusters(const Mesh& m,
                                                      const ConnectivityTables& t,
                                                      int level) {
    const int ne = static_cast<int>(m.edges.size());
    std::vector<char> candidate(ne, 0);
    std::vector<int> seeds;
    for (int e = 0; e < ne; ++e) {
        if (!m.edges[e].alive || m.edges[e].boundary != kEdgeInterior) continue;
        if (m.edge_owners(t, e).size() != 1) continue;
        candidate[e] = 1;
        seeds.push_back(e);
    }

    // Node -> candidate edges, with periodic partners bridged so that a
    // sliding circle crossing the seam forms one component.
    std::vector<std::vector<int>> node_edges(m.nodes.size());
    auto add_node = [&](int n, int e) {
        node_edges[n].push_back(e);
        const int up = m.nodes[n].pair_up;
        const int dn = m.nodes[n].pair_down;
        if (up >= 0) node_edges[up].push_back(e);
        if (dn >= 0) node_edges[dn].push_back(e);
    };
    for (int e : seeds)
        for (int n : t.edge2vertex[e])
            if (m.nodes[n].alive) add_node(n, e);

    std::vector<InterfaceCluster> clusters;
    std::vector<char> used(ne, 0);
    for (int seed : seeds) {
        if (used[seed]) continue;
        const auto seed_ep = m.edge_endpoints(t, seed);
        const Vec2 la = m.coords(seed_ep[0], level);
        const Vec2 lb = m.coords(seed_ep[1], level);

        InterfaceCluster c;
        c.level = level;
        std::vector<int> stack{seed};
        used[seed] = 1;
        while (!stack.empty()) {
            const int e = stack.back();
            stack.pop_back();
            c.edges.push_back(e);
            for (int n : t.edge2vertex[e]) {
                if (!m.nodes[n].alive) continue;
                for (int other : node_edges[n]) {
                    if (used[other] || !candidate[other]) continue;
                    const auto ep = m.edge_endpoints(t, other);
                    if (collinear(la, lb, m.coords(ep[0], level), kCollinearTol) &&
                        collinear(la, lb, m.coords(ep[1], level), kCollinearTol)) {
                        used[other] = 1;
                        stack.push_back(other);
                    }
                }
            }
        }
        std::sort(c.edges.begin(), c.edges.end());

        // Canonical frame: anchor at the smallest-id endpoint, direction of
        // the longest edge with a lexicographically positive sign.
        int anchor_node = -1;
        Scalar best_len = -1.0;
        Vec2 best_dir;
        for (int e : c.edges) {
            const auto ep = m.edge_endpoints(t, e);
            anchor_node = anchor_node < 0 ? std::min(ep[0], ep[1])
                                          : std::min({anchor_node, ep[0], ep[1]});
            const Vec2 d = m.coords(ep[1], level) - m.coords(ep[0], level);
            const Scalar len = d.norm();
            if (len > best_len) {
                best_len = len;
                best_dir = d / len;
            }
        }
        if (best_len <= 0.0)
            throw GeometryError("interface cluster has no edge of positive length");
        if (best_dir.x < 0.0 || (best_dir.x == 0.0 && best_dir.y < 0.0))
            best_dir = -best_dir;
        c.anchor = m.coords(anchor_node, level);
        c.dir = best_dir;

        // A meridional cluster spanning the whole period is a closed circle.
        if (m.period_y > 0.0 && std::abs(c.dir.y) > 0.99) {
            Scalar smin = 0.0, smax = 0.0;
            bool first = true;
            for (int e : c.edges) {
                for (int n : {m.edge_endpoints(t, e)[0], m.edge_endpoints(t, e)[1]}) {
                    const Scalar s = line_param(m.coords(n, level), c.anchor, c.dir);
                    smin = first ? s : std::min(smin, s);
                    smax = first ? s : std::max(smax, s);
                    first = false;
                }
            }
            c.wraps = (smax - smin) >= m.period_y * (1.0 - 1e-6);
        }
        clusters.push_back(std::move(c));
    }
    return clusters;
}

int cluster_edge_side(const Mesh& m, const ConnectivityTables& t,
                      const InterfaceCluster& c, int e) {
    const auto owners = m.edge_owners(t, e);
    if (owners.size() != 1)
        throw TopologyError("cluster_edge_side: edge " + std::to_string(e) +
                            " is not a single-owner interface edge");
    const auto ep = m.edge_endpoints(t, e);
    const Vec2 d = m.coords(ep[1], c.level) - m.coords(ep[0], c.level);
    const Scalar along = d.dot(c.dir);
    if (along == 0.0)
        throw GeometryError("cluster_edge_side: edge " + std::to_string(e) +
                            " is perpendicular to its cluster line");
    const int dir_sign = along > 0.0 ? 1 : -1;
    return owners[0].forward ? dir_sign : -dir_sign;
}

// ---- Interface sweep -------------------------------------------------------------

namespace {

/// Sweep one interface cluster into sub-faces cut at every node on the line.
/// Pieces are built along +dir so their normals point out of the +1 side.
void sweep_cluster(const Mesh& m, const ConnectivityTables& t, Scalar dt,
                   const InterfaceCluster& c,
                   std::vector<SpaceTimeFace>& faces) {
    const Scalar period = c.wraps ? m.period_y : 0.0;

    // Cut points: every live node listed on any member edge.
    std::set<int> node_set;
    for (int e : c.edges)
        for (int n : t.edge2vertex[e])
            if (m.nodes[n].alive) node_set.insert(n);

    std::vector<SweepCut> cuts;
    cuts.reserve(node_set.size());
    for (int n : node_set) {
        SweepCut cut;
        cut.node = n;
        cut.s_old = line_param(m.coords(n, 0), c.anchor, c.dir);
        cut.s_new = line_param(m.coords(n, 1), c.anchor, c.dir);
        cuts.push_back(cut);
    }

    Scalar scale = 0.0;
    Scalar smin_old = cuts.front().s_old;
    for (const SweepCut& cut : cuts) smin_old = std::min(smin_old, cut.s_old);
    for (const SweepCut& cut : cuts)
        scale = std::max({scale, cut.s_old - smin_old, std::abs(cut.s_new - cut.s_old)});

    if (period > 0.0) {
        // Fold the upper chain images (periodic partners of the lower ends,
        // possibly several windows up once the chains have slid far) into the
        // fundamental window so the circle closes on itself.
        for (SweepCut& cut : cuts) {
            while (cut.s_old - smin_old >= period * (1.0 - 1e-6)) {
                cut.lift -= 1.0;
                cut.s_old -= period;
                cut.s_new -= period;
            }
        }
    }

    const Scalar tol = kCutDedupeTol * std::max(scale, period);
    sort_and_dedupe_cuts(cuts, tol);
    if (period > 0.0) {
        // Closing piece of the circle: replicate the first cut one period up.
        SweepCut closing = cuts.front();
        closing.lift += 1.0;
        closing.s_old += period;
        closing.s_new += period;
        cuts.push_back(closing);
    }
    if (cuts.size() < 2) return;

    // Side covers.
    std::vector<SweepCover> covers[2];  // [0]: side +1, [1]: side -1
    for (int e : c.edges) {
        const int side = cluster_edge_side(m, t, c, e);
        const auto ep = m.edge_endpoints(t, e);
        SweepCover cov;
        cov.edge = e;
        cov.elem = m.edge_owners(t, e)[0].elem;
        for (int level = 0; level < 2; ++level) {
            const Scalar sa = line_param(m.coords(ep[0], level), c.anchor, c.dir);
            const Scalar sb = line_param(m.coords(ep[1], level), c.anchor, c.dir);
            cov.lo[level] = std::min(sa, sb);
            cov.hi[level] = std::max(sa, sb);
        }
        cov.center = 0.5 * (cov.lo[0] + cov.hi[0]);
        covers[side > 0 ? 0 : 1].push_back(cov);
    }
    for (auto& list : covers)
        std::sort(list.begin(), list.end(),
                  [](const SweepCover& a, const SweepCover& b) { return a.edge < b.edge; });

    const Scalar cover_tol = kCoverTol * std::max(scale, period);
    auto window_pos = [&](const SweepCut& cut, int level) -> Vec2 {
        return m.coords(cut.node, level) + Vec2{0.0, cut.lift * m.period_y};
    };

    for (std::size_t k = 0; k + 1 < cuts.size(); ++k) {
        const SweepCut& ca = cuts[k];
        const SweepCut& cb = cuts[k + 1];
        const Scalar ext_old = cb.s_old - ca.s_old;
        const Scalar ext_new = cb.s_new - ca.s_new;
        if (ext_old <= tol && ext_new <= tol) continue;

        const int ql = ext_old >= ext_new ? 0 : 1;
        const Scalar smid = ql == 0 ? 0.5 * (ca.s_old + cb.s_old)
                                    : 0.5 * (ca.s_new + cb.s_new);
        const auto pos = find_cover(covers[0], ql, smid, period, cover_tol);
        const auto neg = find_cover(covers[1], ql, smid, period, cover_tol);
        if (!pos && !neg) {
            std::ostringstream os;
            os << "interface sweep: piece [" << ca.s_old << ", " << cb.s_old
               << "] at nodes " << ca.node << "/" << cb.node
               << " is covered by neither side";
            throw TopologyError(os.str());
        }

        SpaceTimeFace f;
        if (pos) {
            f = lateral_face(window_pos(ca, 0), window_pos(cb, 0),
                             window_pos(cb, 1), window_pos(ca, 1), dt);
            f.left = pos->elem;
            f.edge = pos->edge;
            f.left_offset = Vec2{0.0, pos->lift * m.period_y};
            if (neg) {
                f.right = neg->elem;
                f.right_offset = Vec2{0.0, neg->lift * m.period_y};
            } else {
                f.boundary = kEdgeExposed;
            }
        } else {
            // Only the -1 side exists: orient the piece out of it.
            f = lateral_face(window_pos(cb, 0), window_pos(ca, 0),
                             window_pos(ca, 1), window_pos(cb, 1), dt);
            f.left = neg->elem;
            f.edge = neg->edge;
            f.left_offset = Vec2{0.0, neg->lift * m.period_y};
            f.boundary = kEdgeExposed;
        }
        if (f.area > 0.0) faces.push_back(f);
    }
}

// ---- Periodic seam -----------------------------------------------------------------

/// Match the y-boundary edges of a y-periodic mesh into interior faces. Each
/// face is built on the lower side's geometry (the upper side is shifted down
/// by one period); the upper element evaluates its data one period up.
void sweep_seam(const Mesh& m, const ConnectivityTables& t, Scalar dt,
                std::vector<SpaceTimeFace>& faces, std::vector<char>& handled) {
    const Scalar period = m.period_y;
    std::vector<int> bottom, top;
    for (int e = 0; e < static_cast<int>(m.edges.size()); ++e) {
        if (!m.edges[e].alive) continue;
        if (m.edges[e].boundary == kEdgeYMin) bottom.push_back(e);
        if (m.edges[e].boundary == kEdgeYMax) top.push_back(e);
    }
    if (bottom.empty() && top.empty()) return;
    if (bottom.empty() || top.empty())
        throw TopologyError("periodic seam: only one y-boundary has edges");

    // Cuts: endpoint nodes of both sides, parameterized by x; upper nodes are
    // shifted down one period and coincide with their partners.
    std::set<int> bottom_nodes, top_nodes;
    for (int e : bottom)
        for (int n : {m.edge_endpoints(t, e)[0], m.edge_endpoints(t, e)[1]})
            bottom_nodes.insert(n);
    for (int e : top)
        for (int n : {m.edge_endpoints(t, e)[0], m.edge_endpoints(t, e)[1]})
            top_nodes.insert(n);

    std::vector<SweepCut> cuts;
    for (int n : bottom_nodes)
        cuts.push_back({n, m.coords(n, 0).x, m.coords(n, 1).x, 0.0, false});
    for (int n : top_nodes)
        cuts.push_back({n, m.coords(n, 0).x, m.coords(n, 1).x, 0.0, true});

    Scalar scale = 0.0;
    for (const SweepCut& a : cuts)
        scale = std::max({scale, std::abs(a.s_old - cuts.front().s_old),
                          std::abs(a.s_new - a.s_old)});
    const Scalar tol = kCutDedupeTol * std::max(scale, period);
    sort_and_dedupe_cuts(cuts, tol);
    if (cuts.size() < 2) return;

    std::vector<SweepCover> covers[2];  // [0]: bottom, [1]: top
    auto add_covers = [&](const std::vector<int>& edges, int which) {
        for (int e : edges) {
            const auto owners = m.edge_owners(t, e);
            if (owners.size() != 1)
                throw TopologyError("periodic seam edge " + std::to_string(e) +
                                    " does not have exactly one owner");
            SweepCover cov;
            cov.edge = e;
            cov.elem = owners[0].elem;
            for (int level = 0; level < 2; ++level) {
                const auto ep = m.edge_endpoints(t, e);
                const Scalar sa = m.coords(ep[0], level).x;
                const Scalar sb = m.coords(ep[1], level).x;
                cov.lo[level] = std::min(sa, sb);
                cov.hi[level] = std::max(sa, sb);
            }
            cov.center = 0.5 * (cov.lo[0] + cov.hi[0]);
            covers[which].push_back(cov);
        }
        std::sort(covers[which].begin(), covers[which].end(),
                  [](const SweepCover& a, const SweepCover& b) { return a.edge < b.edge; });
    };
    add_covers(bottom, 0);
    add_covers(top, 1);

    const Scalar cover_tol = kCoverTol * std::max(scale, period);

    // Piece corners are interpolated on the covering edge itself: the two
    // seam sides can belong to columns sliding independently, so a cut's node
    // coordinates only pin its x-station, not the height of each side. Hitting
    // an endpoint station returns the endpoint bitwise, so pieces tile each
    // edge's patch exactly.
    auto point_on_edge = [&](int edge, int level, Scalar x, Scalar y_shift) -> Vec2 {
        const auto ep = m.edge_endpoints(t, edge);
        const Vec2 p = m.coords(ep[0], level);
        const Vec2 q = m.coords(ep[1], level);
        Vec2 r = p;
        if (q.x != p.x) {
            const Scalar u = (x - p.x) / (q.x - p.x);
            if (u >= 1.0 - 1e-12)
                r = q;
            else if (u > 1e-12)
                r = p + u * (q - p);
        }
        return {r.x, r.y + y_shift};
    };

    for (std::size_t k = 0; k + 1 < cuts.size(); ++k) {
        const SweepCut& ca = cuts[k];
        const SweepCut& cb = cuts[k + 1];
        const Scalar ext_old = cb.s_old - ca.s_old;
        const Scalar ext_new = cb.s_new - ca.s_new;
        if (ext_old <= tol && ext_new <= tol) continue;

        const int ql = ext_old >= ext_new ? 0 : 1;
        const Scalar smid = ql == 0 ? 0.5 * (ca.s_old + cb.s_old)
                                    : 0.5 * (ca.s_new + cb.s_new);
        const auto bot = find_cover(covers[0], ql, smid, 0.0, cover_tol);
        const auto up = find_cover(covers[1], ql, smid, 0.0, cover_tol);
        if (!bot && !up)
            throw TopologyError("periodic seam: uncovered piece in x");

        SpaceTimeFace f;
        if (bot) {
            // Interior lies above the lower boundary: a->b along +x points
            // the normal down and out of the bottom element.
            f = lateral_face(point_on_edge(bot->edge, 0, ca.s_old, 0.0),
                             point_on_edge(bot->edge, 0, cb.s_old, 0.0),
                             point_on_edge(bot->edge, 1, cb.s_new, 0.0),
                             point_on_edge(bot->edge, 1, ca.s_new, 0.0), dt);
            f.left = bot->elem;
            f.edge = bot->edge;
            if (up) {
                f.right = up->elem;
                f.right_offset = Vec2{0.0, period};
            } else {
                f.boundary = kEdgeExposed;
            }
        } else {
            f = lateral_face(point_on_edge(up->edge, 0, cb.s_old, -period),
                             point_on_edge(up->edge, 0, ca.s_old, -period),
                             point_on_edge(up->edge, 1, ca.s_new, -period),
                             point_on_edge(up->edge, 1, cb.s_new, -period), dt);
            f.left = up->elem;
            f.edge = up->edge;
            f.left_offset = Vec2{0.0, period};
            f.boundary = kEdgeExposed;
        }
        if (f.area > 0.0) faces.push_back(f);
    }

    for (int e : bottom) handled[e] = 1;
    for (int e : top) handled[e] = 1;
}

}  // namespace

// ---- Face list --------------------------------------------------------------------

std::vector<SpaceTimeFace> build_faces(const Mesh& m, Scalar dt) {
    if (!(dt > 0.0)) throw ConfigError("build_faces: dt must be positive");
    const ConnectivityTables& t = m.cur;
    std::vector<SpaceTimeFace> faces;
    std::vector<char> handled(m.edges.size(), 0);

    if (m.period_y > 0.0) sweep_seam(m, t, dt, faces, handled);

    for (const InterfaceCluster& c : find_interface_clusters(m, t, 0)) {
        sweep_cluster(m, t, dt, c, faces);
        for (int e : c.edges) handled[e] = 1;
    }

    for (int e = 0; e < static_cast<int>(m.edges.size()); ++e) {
        if (!m.edges[e].alive || handled[e]) continue;
        const auto owners = m.edge_owners(t, e);
        auto ep = m.edge_endpoints(t, e);
        SpaceTimeFace f;
        if (owners.size() == 2) {
            if (t.edge2vertex[e].size() != 2)
                throw TopologyError("conforming edge " + std::to_string(e) +
                                    " carries intermediate nodes");
            if (owners[0].forward == owners[1].forward)
                throw TopologyError("edge " + std::to_string(e) +
                                    " is traversed twice in the same direction");
            const EdgeOwner& fwd = owners[0].forward ? owners[0] : owners[1];
            const EdgeOwner& bwd = owners[0].forward ? owners[1] : owners[0];
            f = lateral_face(m.coords(ep[0], 0), m.coords(ep[1], 0),
                             m.coords(ep[1], 1), m.coords(ep[0], 1), dt);
            f.left = fwd.elem;
            f.right = bwd.elem;
        } else if (owners.size() == 1) {
            if (m.edges[e].boundary == kEdgeInterior)
                throw TopologyError("interior edge " + std::to_string(e) +
                                    " has one owner but joined no interface cluster");
            if (!owners[0].forward) std::swap(ep[0], ep[1]);
            f = lateral_face(m.coords(ep[0], 0), m.coords(ep[1], 0),
                             m.coords(ep[1], 1), m.coords(ep[0], 1), dt);
            f.left = owners[0].elem;
            f.boundary = m.edges[e].boundary;
        } else {
            throw TopologyError("edge " + std::to_string(e) + " has " +
                                std::to_string(owners.size()) + " owners");
        }
        f.edge = e;
        if (f.area > 0.0) faces.push_back(f);
    }
    return faces;
}

// ---- Overlap adjacency ---------------------------------------------------------------

void refresh_overlap_adjacency(Mesh& m, ConnectivityTables& t, int level) {
    // Strip all non-owner entries, then rebuild them per interface cluster.
    for (int e = 0; e < static_cast<int>(m.edges.size()); ++e) {
        if (!m.edges[e].alive) continue;
        auto& row = t.edge2elem[e];
        std::vector<int> owners;
        for (int i : row) {
            const auto& be = t.elem2edge[i];
            if (std::find(be.begin(), be.end(), e) != be.end()) owners.push_back(i);
        }
        row = std::move(owners);
    }

    for (const InterfaceCluster& c : find_interface_clusters(m, t, level)) {
        const Scalar period = c.wraps ? m.period_y : 0.0;
        struct Span {
            int edge, elem;
            Scalar lo, hi, center;
        };
        std::vector<Span> spans[2];
        Scalar scale = 0.0;
        for (int e : c.edges) {
            const auto ep = m.edge_endpoints(t, e);
            const Scalar sa = line_param(m.coords(ep[0], level), c.anchor, c.dir);
            const Scalar sb = line_param(m.coords(ep[1], level), c.anchor, c.dir);
            Span s{e, m.edge_owners(t, e)[0].elem, std::min(sa, sb), std::max(sa, sb),
                   0.5 * (sa + sb)};
            scale = std::max(scale, s.hi - s.lo);
            spans[cluster_edge_side(m, t, c, e) > 0 ? 0 : 1].push_back(s);
        }
        const Scalar tol = kCutDedupeTol * std::max(scale, period);
        for (int side = 0; side < 2; ++side) {
            for (const Span& a : spans[side]) {
                std::vector<int> partners;
                for (const Span& b : spans[1 - side]) {
                    Scalar k = 0.0;
                    if (period > 0.0)
                        k = static_cast<Scalar>(std::llround((a.center - b.center) / period));
                    const Scalar lo = std::max(a.lo, b.lo + k * period);
                    const Scalar hi = std::min(a.hi, b.hi + k * period);
                    if (hi - lo > tol) partners.push_back(b.elem);
                }
                std::sort(partners.begin(), partners.end());
                partners.erase(std::unique(partners.begin(), partners.end()),
                               partners.end());
                auto& row = t.edge2elem[a.edge];
                for (int p : partners)
                    if (std::find(row.begin(), row.end(), p) == row.end())
                        row.push_back(p);
            }
        }
    }
}

// ---- Closure audit ----------------------------------------------------------------

ClosureReport closure_audit(const Mesh& m, const ConnectivityTables& t,
                            const std::vector<SpaceTimeFace>& faces) {
    std::vector<Vec3> residual(m.elems.size());
    std::vector<Scalar> measure(m.elems.size(), 0.0);
    for (const SpaceTimeFace& f : faces) {
        residual[f.left] += f.vector_area;
        measure[f.left] = std::max(measure[f.left], f.area);
        if (f.right >= 0) {
            residual[f.right] += -1.0 * f.vector_area;
            measure[f.right] = std::max(measure[f.right], f.area);
        }
    }
    ClosureReport report;
    for (int i = 0; i < static_cast<int>(m.elems.size()); ++i) {
        if (!m.elems[i].alive) continue;
        const Scalar a0 = m.element_area(t, i, 0);
        const Scalar a1 = m.element_area(t, i, 1);
        Vec3 r = residual[i];
        r.z += a1 - a0;
        const Scalar rel = r.norm() / std::max({measure[i], a0, a1});
        if (rel > report.max_rel) {
            report.max_rel = rel;
            report.worst_elem = i;
        }
    }
    return report;
}

}  // namespace alefv
