/// @file detector.cpp
/// @brief Shear-interface detection: thresholds, tangential jumps, and the
///        sequential edge/node marking loops.

#include "alefv/detector.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace alefv {

namespace {

constexpr Scalar kJumpGuard = 1e-14;  // keeps the rest state at jump zero

Scalar frobenius(const Vec2& col0, const Vec2& col1) {
    return std::sqrt(col0.norm2() + col1.norm2());
}

}  // namespace

// ---- Threshold pieces ---------------------------------------------------------

Scalar element_shape_ratio(const Mesh& m, const ConnectivityTables& t, int elem) {
    const std::vector<Vec2> poly = m.element_polygon(t, elem, 0);
    const std::size_t n = poly.size();
    if (n < 3) {
        throw GeometryError("element_shape_ratio: element " +
                            std::to_string(elem) + " has fewer than 3 vertices");
    }

    Scalar area2 = 0.0;  // twice the signed area
    Scalar perim = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
        const Vec2& a = poly[k];
        const Vec2& b = poly[(k + 1) % n];
        area2 += a.cross(b);
        perim += (b - a).norm();
    }
    if (perim <= 0.0) {
        throw GeometryError("element_shape_ratio: element " +
                            std::to_string(elem) + " has zero perimeter");
    }
    const Scalar inradius = std::abs(area2) / perim;  // 2A / P

    Vec2 col0, col1;
    if (n == 3) {
        col0 = poly[1] - poly[0];
        col1 = poly[2] - poly[0];
    } else if (n == 4) {
        // Bilinear reference-square map, Jacobian at the cell center.
        col0 = 0.5 * ((poly[1] - poly[0]) + (poly[2] - poly[3]));
        col1 = 0.5 * ((poly[3] - poly[0]) + (poly[2] - poly[1]));
    } else {
        const Vec2 bary = m.element_barycenter(t, elem, 0);
        col0 = poly[0] - bary;
        col1 = poly[1] - bary;
    }
    return inradius / frobenius(col0, col1);
}

Scalar edge_threshold(const Mesh& m, const ConnectivityTables& t, int e,
                      Scalar alpha) {
    const auto ends = m.edge_endpoints(t, e);
    Scalar kappa_e = std::numeric_limits<Scalar>::infinity();
    for (const int j : ends) {
        Scalar kappa_j = -1.0;
        for (const int i : t.vertex2elem[j]) {
            if (!m.elems[i].alive) continue;
            kappa_j = std::max(kappa_j, alpha * element_shape_ratio(m, t, i));
        }
        if (kappa_j >= 0.0) kappa_e = std::min(kappa_e, kappa_j);
    }
    return kappa_e;
}

Scalar tangential_jump(const Vec2& tangent, const Vec2& va, const Vec2& vb,
                       Scalar area_a, Scalar area_b) {
    const Scalar vta = tangent.dot(va);
    const Scalar vtb = tangent.dot(vb);
    const Scalar num = std::abs(vta * area_a - vtb * area_b);
    const Scalar den =
        std::abs(vta) * area_a + std::abs(vtb) * area_b + kJumpGuard;
    return num / den;
}

// ---- Detection --------------------------------------------------------------------

InterfaceMarking detect(const Mesh& m, const ConnectivityTables& t,
                        const std::vector<Vec2>& elem_velocity, Scalar alpha) {
    if (alpha < 0.0) {
        throw ConfigError("detect: alpha must be non-negative, got " +
                          std::to_string(alpha));
    }
    InterfaceMarking mk;
    mk.edge_marked.assign(m.edges.size(), 0);

    // Nearest periodic image keeps side classification stable across the seam.
    const Scalar period = m.period_y;
    const auto nearest_image = [period](Vec2 d) {
        if (period > 0.0) d.y -= period * std::round(d.y / period);
        return d;
    };

    std::vector<Vec2> bary(m.elems.size());
    std::vector<Scalar> area(m.elems.size(), 0.0);
    std::vector<Scalar> ratio(m.elems.size(), 0.0);
    for (std::size_t i = 0; i < m.elems.size(); ++i) {
        if (!m.elems[i].alive) continue;
        const int ei = static_cast<int>(i);
        bary[i] = m.element_barycenter(t, ei, 0);
        area[i] = m.element_area(t, ei, 0);
        ratio[i] = element_shape_ratio(m, t, ei);
    }

    // Per-node thresholds, shared by all edges at the node.
    std::vector<Scalar> kappa_node(m.nodes.size(),
                                   std::numeric_limits<Scalar>::infinity());
    for (std::size_t k = 0; k < m.nodes.size(); ++k) {
        if (!m.nodes[k].alive) continue;
        Scalar kj = -1.0;
        for (const int i : t.vertex2elem[k]) {
            if (m.elems[i].alive) kj = std::max(kj, alpha * ratio[i]);
        }
        if (kj >= 0.0) kappa_node[k] = kj;
    }

    // ---- Edge loop: pairwise jump test across each edge's line ----
    std::vector<int> side;
    for (std::size_t eu = 0; eu < m.edges.size(); ++eu) {
        const int e = static_cast<int>(eu);
        if (!m.edges[eu].alive) continue;
        const auto& adj = t.edge2elem[eu];
        if (adj.size() < 2) continue;

        const auto ends = m.edge_endpoints(t, e);
        const Vec2 xa = m.coords(ends[0], 0);
        const Vec2 dir = m.coords(ends[1], 0) - xa;
        const Scalar len = dir.norm();
        if (len <= 0.0) continue;
        const Vec2 tangent = dir / len;

        side.assign(adj.size(), 0);
        for (std::size_t k = 0; k < adj.size(); ++k) {
            const Vec2 d = nearest_image(bary[adj[k]] - xa);
            side[k] = tangent.cross(d) > 0.0 ? 1 : -1;
        }

        const Scalar kappa = std::min(kappa_node[ends[0]], kappa_node[ends[1]]);
        bool marked = false;
        for (std::size_t a = 0; a + 1 < adj.size() && !marked; ++a) {
            for (std::size_t b = a + 1; b < adj.size() && !marked; ++b) {
                if (side[a] == side[b]) continue;
                const Scalar dv =
                    tangential_jump(tangent, elem_velocity[adj[a]],
                                    elem_velocity[adj[b]], area[adj[a]],
                                    area[adj[b]]);
                if (dv >= kappa) marked = true;
            }
        }
        if (marked) {
            mk.edge_marked[eu] = 1;
            mk.marked_edges.push_back(e);
        }
    }

    // ---- Node loop: queue nodes whose Voronoi list straddles the line ----
    for (std::size_t ku = 0; ku < m.nodes.size(); ++ku) {
        const int k = static_cast<int>(ku);
        if (!m.nodes[ku].alive) continue;

        Vec2 dir;
        bool on_interface = false;
        for (const int e : t.vertex2edge[ku]) {
            if (!mk.edge_marked[e]) continue;
            const auto ends = m.edge_endpoints(t, e);
            if (ends[0] != k && ends[1] != k) continue;  // hanging nodes stay
            Vec2 d = m.coords(ends[1], 0) - m.coords(ends[0], 0);
            if (d.x < 0.0 || (d.x == 0.0 && d.y < 0.0)) d = -d;
            dir = d.normalized();
            on_interface = true;
            break;
        }
        if (!on_interface) continue;

        const Vec2 xk = m.coords(k, 0);
        std::vector<int> left, right;
        for (const int i : t.vertex2elem[ku]) {
            if (!m.elems[i].alive) continue;
            const Vec2 d = nearest_image(bary[i] - xk);
            (dir.cross(d) > 0.0 ? left : right).push_back(i);
        }
        if (left.empty() || right.empty()) continue;

        mk.nodes_to_double.push_back(k);
        mk.side_left.push_back(std::move(left));
        mk.side_right.push_back(std::move(right));
        mk.interface_dir.push_back(dir);
    }
    return mk;
}

}  // namespace alefv
