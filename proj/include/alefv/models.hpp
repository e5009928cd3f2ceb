/// @file models.hpp
/// @brief The shallow-water model family: Cartesian (plain and with a passive
///        tracer) and polar (plain and well-balanced with bottom topography),
///        with physical fluxes, geometric sources, nonconservative products,
///        and closed-form |A| / sign(A) matvecs of the moving-face operator.
///
/// All four systems share one 3x3 shallow-water core. The polar systems solve
/// in the (r, phi) chart with conserved densities premultiplied by r; their
/// core is the Cartesian one contracted with the generalized normal
/// kappa = (n_x, n_y / r), which keeps the celerity sqrt(g h) and adds
/// passively-coupled rows (the radius field, and for the well-balanced system
/// the bottom field) handled by block-triangular divided differences.
#pragma once

#include <string>
#include <vector>

#include "alefv/core.hpp"

namespace alefv {

// ---- Face frame -----------------------------------------------------------

/// Spatial decomposition of a unit space-time face normal: n_hat is the unit
/// spatial direction, s the spatial magnitude of the space-time normal, and
/// omega = -n_t / s the normal velocity of the face.
struct FaceFrame {
    Vec2 n_hat{1.0, 0.0};
    Scalar s = 1.0;
    Scalar omega = 0.0;
};

/// Decompose a unit space-time normal. Throws GeometryError when the spatial
/// part vanishes (a face swept by a collapsing edge never reaches assembly).
FaceFrame face_frame(const Vec3& unit_normal);

// ---- Models ------------------------------------------------------------------

enum class ModelKind {
    ShallowWater,        ///< (h, hu, hv) in Cartesian coordinates
    ShallowWaterTracer,  ///< (h, hu, hv, hc) with a passively advected tracer
    Polar,               ///< (rh, r h u_r, r h u_phi, r) in the (r, phi) chart
    PolarWellBalanced,   ///< (rh, r h u_r, r h u_phi, r b, r): pressure moved
                         ///< into a nonconservative product for equilibria
};

class Model {
public:
    Model(ModelKind kind, Scalar gravity = kDefaultGravity);

    ModelKind kind() const { return kind_; }
    int nvars() const { return nvars_; }
    Scalar gravity() const { return gravity_; }
    bool is_polar() const {
        return kind_ == ModelKind::Polar || kind_ == ModelKind::PolarWellBalanced;
    }
    bool has_source() const { return kind_ == ModelKind::Polar; }
    bool has_nonconservative() const { return kind_ == ModelKind::PolarWellBalanced; }
    const std::vector<std::string>& var_names() const { return var_names_; }

    // -- Physics --------------------------------------------------------------

    State flux_x(const State& q) const;
    State flux_y(const State& q) const;
    /// Geometric source of the plain polar system (zero for the others).
    State source(const State& q) const;
    /// Directional nonconservative product (B1 nx + B2 ny) dq; nonzero only
    /// for the well-balanced system, whose pressure lives in B1.
    State noncons_product(const State& q, const Vec2& n_hat, const State& dq) const;
    /// Space-time flux through a unit normal: f nx + g ny + q nt.
    State spacetime_flux(const State& q, const Vec3& ntilde) const;

    // -- Primitives --------------------------------------------------------------

    Scalar depth(const State& q) const;
    /// Fluid velocity in chart coordinates (dx/dt, dy/dt); for polar systems
    /// the second component is the angular rate u_phi / r.
    Vec2 chart_velocity(const State& q) const;
    Scalar celerity(const State& q) const;
    /// Fastest chart-space signal speed, the time-step bound.
    Scalar max_signal_speed(const State& q) const;
    /// Throws PositivityError for non-positive depth (or radius).
    void check_admissible(const State& q, const std::string& where) const;

    // -- Face operator -------------------------------------------------------------

    /// The moving-face operator is A = s (dF_n/dq + B_n - omega I) with
    /// F_n = f nx + g ny. These apply |A| and sign(A) to a jump analytically
    /// through the shared shallow-water wave basis plus divided-difference
    /// couplings for the passive rows.
    State abs_a_times(const State& q, const FaceFrame& fr, const State& dq) const;
    State sign_a_times(const State& q, const FaceFrame& fr, const State& dq) const;
    /// Largest |eigenvalue| of the face operator.
    Scalar max_face_eigen(const State& q, const FaceFrame& fr) const;

private:
    enum class MatFn { Abs, Sign };
    State apply_face_fn(const State& q, const FaceFrame& fr, const State& dq,
                        MatFn fn) const;

    ModelKind kind_;
    int nvars_;
    Scalar gravity_;
    std::vector<std::string> var_names_;
};

}  // namespace alefv
