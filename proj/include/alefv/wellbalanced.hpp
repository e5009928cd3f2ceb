/// @file wellbalanced.hpp
/// @brief Well-balanced path-conservative face terms for the polar system with
///        the pressure in a nonconservative product: steady rotating-flow
///        profiles, fluctuation decomposition, the discrete jump of the
///        nonconservative terms, and the Osher–Romberg viscosity.

#pragma once

#include <string>

#include "alefv/core.hpp"
#include "alefv/models.hpp"

namespace alefv {

// ---- Steady profiles ----------------------------------------------------------

/// A steady rotating-flow profile of the cylindrical shallow water system:
/// u_r = 0, free surface eta_E(r) and angular velocity uphi_E(r) tied by the
/// centrifugal balance d(eta_E)/dr = uphi_E^2 / (g r), plus zeta(r), a
/// primitive of uphi_E^2 / (g r) used by the path decomposition.
///
/// Shipped families (flat bottom, so the equilibrium depth equals eta_E):
///  - vortexA: eta_E = 1 - e^{-(r^2-1)}/(2g),  uphi_E = r e^{-(r^2-1)/2}
///  - vortexB: eta_E = r^2/(2g),               uphi_E = r
///  - flat:    eta_E = 0,                      uphi_E = 0   (no base flow;
///             fluctuations carry the whole state and the face terms reduce
///             to a plain segment-path scheme)
class EquilibriumProfile {
public:
    static EquilibriumProfile vortex_a(Scalar gravity = kDefaultGravity);
    static EquilibriumProfile vortex_b(Scalar gravity = kDefaultGravity);
    static EquilibriumProfile flat(Scalar gravity = kDefaultGravity);
    /// Lookup by config name {vortexA|vortexB|flat}; throws ConfigError.
    static EquilibriumProfile by_name(const std::string& name,
                                      Scalar gravity = kDefaultGravity);

    const std::string& name() const { return name_; }
    Scalar gravity() const { return gravity_; }

    /// Free surface at the steady state; throws PositivityError for r <= 0.
    Scalar eta_E(Scalar r) const;
    /// Angular velocity at the steady state; throws PositivityError for r <= 0.
    Scalar uphi_E(Scalar r) const;
    /// Primitive of uphi_E^2 / (g r); throws PositivityError for r <= 0.
    Scalar zeta(Scalar r) const;

    /// Conserved 5-vector (rh, r h u_r, r h u_phi, r b, r) of the steady state
    /// at radius r.  Cell data sampled through this function sits bitwise on
    /// the discrete equilibrium that the face terms cancel on.
    State equilibrium_state(Scalar r) const;

private:
    enum class Family { VortexA, VortexB, Flat };

    EquilibriumProfile(Family family, Scalar gravity, std::string name);

    Family family_;
    Scalar gravity_;
    std::string name_;
};

// ---- Fluctuation decomposition ---------------------------------------------------

/// Split of a state into the steady part at its own radius plus a fluctuation:
/// q_E = equilibrium_state(q[4]) and q_f = q_h - q_E.
struct FluctuationState {
    State q_E;
    State q_f;
};

FluctuationState fluctuation_split(const EquilibriumProfile& profile,
                                   const State& q_h);

// ---- Face terms --------------------------------------------------------------

/// Discrete jump of the nonconservative terms across a face, integrated along
/// the steady-plus-fluctuation path with the midpoint rule:
///   components (0, b2, b3, 0, 0) with
///   b2 = [ g <rh> d(eta_f) - g <rh> <(uphi^2 - uphi_E^2)/(r g)> dr ] nx
///   b3 =   <r h u_r> <uphi> dr nx,
/// where <.> is the arithmetic mean of the two sides, d(eta_f) the jump of the
/// free-surface fluctuation, dr the radius jump, and nx the radial component
/// of the unit space-time normal.  Only the ql-to-qr orientation matters; the
/// result is invariant under swapping sides and flipping the normal.
State noncons_jump(const Model& mdl, const EquilibriumProfile& profile,
                   const State& ql, const State& qr, const Vec3& unit_normal);

/// Osher-type viscosity along the steady-plus-fluctuation path, evaluated by
/// the three-node Romberg rule (nodes 1/4, 3/4, 1/2 with weights 2/3, 2/3,
/// -1/3 and half-spans 1/4, 1/4, 1/2):
///   V = sum_j w_j sign(A_n(path(s_j))) R_j / (2 e_j),
///   R_j = F(path(s_j+e_j))·ñ - F(path(s_j-e_j))·ñ + noncons_jump(...)
/// so that each R_j is the full jump carried by the sub-segment and sign(A_n)
/// is applied analytically through the wave basis (sign(0) = 0, which leaves
/// resting contacts undamped).  Vanishes on sub-segments of a steady profile
/// and therefore on any pair of states sampled from one.
State osher_romberg_viscosity(const Model& mdl, const EquilibriumProfile& profile,
                              const State& ql, const State& qr,
                              const Vec3& unit_normal);

/// Well-balanced face term, per unit face area, subtracted from the cell that
/// owns ql and whose outward unit space-time normal is ñ:
///   ½ (F(qr)·ñ - F(ql)·ñ + noncons_jump) - ½ V.
/// This is a fluctuation (zero for equal traces), not a conservative flux; the
/// two sides of a face receive different terms whose sum is the full jump.
State wb_face_term(const Model& mdl, const EquilibriumProfile& profile,
                   const State& ql, const State& qr, const Vec3& unit_normal);

}  // namespace alefv
