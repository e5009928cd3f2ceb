/// @file reconstruct.cpp
/// @brief Least-squares slope reconstruction with flux-point limiting and
///        the element-interior predictor rate.

#include "alefv/reconstruct.hpp"

#include <algorithm>
#include <cmath>

namespace alefv {

namespace {

/// Normal-equation determinant below this fraction of its natural scale
/// means the stencil is (nearly) collinear and gets a zero slope.
constexpr Scalar kDegenerateTol = 1e-12;

/// Candidate increments smaller than this fraction of the data scale do
/// not engage the limiter (they are indistinguishable from roundoff).
constexpr Scalar kFlatTol = 1e-14;

}  // namespace

// ---- Low-level pieces -------------------------------------------------------

bool lsq_slope(std::span<const Vec2> offsets, std::span<const Scalar> deltas,
               Vec2& slope) {
    slope = {0.0, 0.0};
    Scalar sxx = 0.0, sxy = 0.0, syy = 0.0, bx = 0.0, by = 0.0;
    for (std::size_t k = 0; k < offsets.size(); ++k) {
        const Vec2 d = offsets[k];
        sxx += d.x * d.x;
        sxy += d.x * d.y;
        syy += d.y * d.y;
        bx += d.x * deltas[k];
        by += d.y * deltas[k];
    }
    const Scalar det = sxx * syy - sxy * sxy;
    const Scalar scale = sxx + syy;
    if (!(det > kDegenerateTol * scale * scale)) return false;
    slope = {(syy * bx - sxy * by) / det, (sxx * by - sxy * bx) / det};
    return true;
}

Scalar barth_jespersen(Scalar qc, Scalar qmin, Scalar qmax,
                       std::span<const Scalar> point_deltas) {
    Scalar alpha = 1.0;
    const Scalar guard = kFlatTol * (std::abs(qc) + 1.0);
    for (const Scalar d : point_deltas) {
        if (std::abs(d) <= guard) continue;
        const Scalar cap = d > 0.0 ? (qmax - qc) / d : (qmin - qc) / d;
        alpha = std::min(alpha, std::max(0.0, cap));
    }
    return alpha;
}

State predictor_rate(const Mesh& m, const ConnectivityTables& t, int elem,
                     const Model& mdl, const State& qmean, const State& slope_x,
                     const State& slope_y) {
    const std::vector<Vec2> poly = m.element_polygon(t, elem, 0);
    const Scalar area = m.element_area(t, elem, 0);
    const Vec2 center = m.element_barycenter(t, elem, 0);
    const int nv = mdl.nvars();

    State rate;
    for (std::size_t k = 0; k < poly.size(); ++k) {
        const Vec2 a = poly[k];
        const Vec2 b = poly[(k + 1) % poly.size()];
        const Vec2 d = b - a;
        const Scalar len = d.norm();
        if (len == 0.0) continue;
        const Vec2 n_out{d.y / len, -d.x / len};  // polygons are CCW
        const Vec2 mid = 0.5 * (a + b);
        const State qe =
            qmean + slope_x * (mid.x - center.x) + slope_y * (mid.y - center.y);
        mdl.check_admissible(qe, "predictor edge state");
        const State fn = mdl.flux_x(qe) * n_out.x + mdl.flux_y(qe) * n_out.y;
        for (int i = 0; i < nv; ++i) rate[i] -= (len / area) * fn[i];
    }
    if (mdl.has_source()) rate += mdl.source(qmean);
    if (mdl.has_nonconservative())
        rate -= mdl.noncons_product(qmean, {1.0, 0.0}, slope_x);
    return rate;
}

// ---- Per-step reconstruction ---------------------------------------------------

Reconstruction reconstruct(const Mesh& m, const ConnectivityTables& t,
                           const Model& mdl, const std::vector<State>& q,
                           const std::vector<SpaceTimeFace>& faces, int order) {
    Reconstruction rec;
    rec.order = order;
    const int ne = static_cast<int>(m.elems.size());
    rec.center.assign(ne, Vec2{0.0, 0.0});
    for (int i = 0; i < ne; ++i)
        if (m.elems[i].alive) rec.center[i] = m.element_barycenter(t, i, 0);
    if (order <= 1) return rec;

    // Stencil: face partners, with periodic/sliding chart offsets applied so
    // every neighbor center is expressed in the element's own chart.
    std::vector<std::vector<std::pair<int, Vec2>>> stencil(ne);
    for (const SpaceTimeFace& f : faces) {
        if (f.left < 0 || f.right < 0) continue;
        stencil[f.left].push_back(
            {f.right, rec.center[f.right] + f.left_offset - f.right_offset});
        stencil[f.right].push_back(
            {f.left, rec.center[f.left] + f.right_offset - f.left_offset});
    }

    const int nv = mdl.nvars();
    rec.slope_x.assign(ne, State{});
    rec.slope_y.assign(ne, State{});
    rec.rate.assign(ne, State{});

    std::vector<Vec2> offsets;
    std::vector<Scalar> deltas;
    std::vector<Scalar> point_deltas;
    for (int i = 0; i < ne; ++i) {
        if (!m.elems[i].alive) continue;
        const auto& nbrs = stencil[i];
        if (!nbrs.empty()) {
            offsets.clear();
            for (const auto& [j, x] : nbrs) offsets.push_back(x - rec.center[i]);
            const std::vector<Vec2> poly = m.element_polygon(t, i, 0);
            for (int v = 0; v < nv; ++v) {
                deltas.clear();
                Scalar qmin = q[i][v], qmax = q[i][v];
                for (const auto& [j, x] : nbrs) {
                    deltas.push_back(q[j][v] - q[i][v]);
                    qmin = std::min(qmin, q[j][v]);
                    qmax = std::max(qmax, q[j][v]);
                }
                Vec2 s;
                if (!lsq_slope(offsets, deltas, s)) continue;
                // Limit at the edge midpoints: these are the points where
                // fluxes evaluate the reconstruction, and (unlike the
                // vertices) they lie inside the hull of the neighbor
                // centroids, so linear data stays unlimited.
                point_deltas.clear();
                for (std::size_t k = 0; k < poly.size(); ++k) {
                    const Vec2 mid = 0.5 * (poly[k] + poly[(k + 1) % poly.size()]);
                    point_deltas.push_back(s.dot(mid - rec.center[i]));
                }
                const Scalar alpha =
                    barth_jespersen(q[i][v], qmin, qmax, point_deltas);
                rec.slope_x[i][v] = alpha * s.x;
                rec.slope_y[i][v] = alpha * s.y;
            }
        }
        rec.rate[i] =
            predictor_rate(m, t, i, mdl, q[i], rec.slope_x[i], rec.slope_y[i]);
    }
    return rec;
}

}  // namespace alefv
