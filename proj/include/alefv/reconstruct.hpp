/// @file reconstruct.hpp
/// @brief Second-order data reconstruction: least-squares slopes from the
///        face-adjacency stencil, slope limiting at the flux points, and the
///        half-step time derivative used by the predictor stage.

#pragma once

#include <span>
#include <vector>

#include "alefv/core.hpp"
#include "alefv/mesh.hpp"
#include "alefv/models.hpp"
#include "alefv/spacetime.hpp"

namespace alefv {

// ---- Low-level pieces -------------------------------------------------------

/// Best-fit slope of the samples (offset_k, delta_k) through the origin by
/// the 2x2 normal equations.  Returns false (and a zero slope) when the
/// stencil spans less than two independent directions.
bool lsq_slope(std::span<const Vec2> offsets, std::span<const Scalar> deltas,
               Vec2& slope);

/// Slope limiter factor in [0, 1]: the largest fraction of the candidate
/// candidate increments `point_deltas` that keeps every evaluation of the
/// linear reconstruction inside [qmin, qmax] around the mean qc.
Scalar barth_jespersen(Scalar qc, Scalar qmin, Scalar qmax,
                       std::span<const Scalar> point_deltas);

/// Interior time derivative of the mean from the element's own linear data:
/// the boundary flux integral (midpoint rule per edge on the old geometry)
/// plus geometric source and nonconservative terms where the model has them.
State predictor_rate(const Mesh& m, const ConnectivityTables& t, int elem,
                     const Model& mdl, const State& qmean, const State& slope_x,
                     const State& slope_y);

// ---- Per-step reconstruction ---------------------------------------------------

/// Limited piecewise-linear space-time reconstruction for every live element.
/// Order 1 keeps all slopes and rates empty; evaluate() then returns the mean.
struct Reconstruction {
    int order = 1;
    std::vector<Vec2> center;    ///< element barycenters at t^n
    std::vector<State> slope_x;  ///< limited slopes, per element per variable
    std::vector<State> slope_y;
    std::vector<State> rate;     ///< predictor time derivatives

    /// Reconstructed state of element `elem` (mean `qi`) at position x and
    /// time offset tau after t^n, in the element's own chart.
    State evaluate(const State& qi, int elem, const Vec2& x, Scalar tau) const {
        if (order <= 1) return qi;
        const Vec2 d = x - center[elem];
        return qi + slope_x[elem] * d.x + slope_y[elem] * d.y + rate[elem] * tau;
    }
};

/// Build the reconstruction from the mean states and the space-time face
/// list (whose left/right pairs and chart offsets define the stencils).
Reconstruction reconstruct(const Mesh& m, const ConnectivityTables& t,
                           const Model& mdl, const std::vector<State>& q,
                           const std::vector<SpaceTimeFace>& faces, int order);

}  // namespace alefv
