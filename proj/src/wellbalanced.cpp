/// @file wellbalanced.cpp
/// @brief Steady rotating-flow profiles and the well-balanced face terms:
///        fluctuation paths, midpoint-rule nonconservative jumps, and the
///        sign-based Osher–Romberg viscosity.

#include "alefv/wellbalanced.hpp"

#include <cmath>
#include <string>

namespace alefv {

// ---- Steady profiles ----------------------------------------------------------

EquilibriumProfile::EquilibriumProfile(Family family, Scalar gravity,
                                       std::string name)
    : family_(family), gravity_(gravity), name_(std::move(name)) {
    if (!(gravity > 0.0))
        throw ConfigError("equilibrium profile: gravity must be positive");
}

EquilibriumProfile EquilibriumProfile::vortex_a(Scalar gravity) {
    return {Family::VortexA, gravity, "vortexA"};
}

EquilibriumProfile EquilibriumProfile::vortex_b(Scalar gravity) {
    return {Family::VortexB, gravity, "vortexB"};
}

EquilibriumProfile EquilibriumProfile::flat(Scalar gravity) {
    return {Family::Flat, gravity, "flat"};
}

EquilibriumProfile EquilibriumProfile::by_name(const std::string& name,
                                               Scalar gravity) {
    if (name == "vortexA") return vortex_a(gravity);
    if (name == "vortexB") return vortex_b(gravity);
    if (name == "flat") return flat(gravity);
    throw ConfigError("unknown equilibrium profile '" + name +
                      "' (expected vortexA, vortexB, or flat)");
}

namespace {

void require_radius(Scalar r) {
    if (!(r > 0.0))
        throw PositivityError("equilibrium profile: non-positive radius r = " +
                              std::to_string(r));
}

}  // namespace

Scalar EquilibriumProfile::eta_E(Scalar r) const {
    require_radius(r);
    switch (family_) {
        case Family::VortexA:
            return 1.0 - std::exp(-(r * r - 1.0)) / (2.0 * gravity_);
        case Family::VortexB:
            return r * r / (2.0 * gravity_);
        case Family::Flat:
            return 0.0;
    }
    return 0.0;  // unreachable
}

Scalar EquilibriumProfile::uphi_E(Scalar r) const {
    require_radius(r);
    switch (family_) {
        case Family::VortexA:
            return r * std::exp(-(r * r - 1.0) / 2.0);
        case Family::VortexB:
            return r;
        case Family::Flat:
            return 0.0;
    }
    return 0.0;  // unreachable
}

Scalar EquilibriumProfile::zeta(Scalar r) const {
    require_radius(r);
    switch (family_) {
        case Family::VortexA:
            return -std::exp(-(r * r - 1.0)) / (2.0 * gravity_);
        case Family::VortexB:
            return r * r / (2.0 * gravity_);
        case Family::Flat:
            return 0.0;
    }
    return 0.0;  // unreachable
}

State EquilibriumProfile::equilibrium_state(Scalar r) const {
    // Flat bottom throughout: the steady depth equals the free surface and
    // the r b component stays zero.  The angular momentum is formed as
    // rh * uphi_E so that the factored excess in noncons_jump cancels it
    // bitwise on sampled steady data.
    const Scalar rh = r * eta_E(r);
    State q;
    q[0] = rh;
    q[2] = rh * uphi_E(r);
    q[4] = r;
    return q;
}

// ---- Fluctuation decomposition ---------------------------------------------------

FluctuationState fluctuation_split(const EquilibriumProfile& profile,
                                   const State& q_h) {
    FluctuationState fs;
    fs.q_E = profile.equilibrium_state(q_h[4]);
    fs.q_f = q_h - fs.q_E;
    return fs;
}

// ---- Face terms --------------------------------------------------------------

namespace {

void require_wb(const Model& mdl, const EquilibriumProfile& profile,
                const char* name) {
    if (mdl.kind() != ModelKind::PolarWellBalanced)
        throw ConfigError(std::string(name) +
                          " applies to the polar nonconservative system only");
    if (mdl.gravity() != profile.gravity())
        throw ConfigError(std::string(name) +
                          ": model and profile disagree on gravity");
}

}  // namespace

State noncons_jump(const Model& mdl, const EquilibriumProfile& profile,
                   const State& ql, const State& qr, const Vec3& unit_normal) {
    require_wb(mdl, profile, "noncons_jump");
    const Scalar g = mdl.gravity();

    // Free-surface fluctuation from the conserved parts, so that states built
    // by equilibrium_state give exactly zero.
    auto eta_f = [&](const State& q) {
        const State qe = profile.equilibrium_state(q[4]);
        return (q[0] - qe[0] + (q[3] - qe[3])) / q[4];
    };
    // (uphi^2 - uphi_E^2)/(r g), factored through the angular-momentum excess
    // for the same bitwise cancellation on steady data.
    auto excess = [&](const State& q) {
        const Scalar ue = profile.uphi_E(q[4]);
        const Scalar du = (q[2] - q[0] * ue) / q[0];
        return du * (q[2] / q[0] + ue) / (q[4] * g);
    };

    const Scalar dr = qr[4] - ql[4];
    const Scalar rh_m = 0.5 * (ql[0] + qr[0]);
    const Scalar deta_f = eta_f(qr) - eta_f(ql);
    const Scalar excess_m = 0.5 * (excess(ql) + excess(qr));
    const Scalar rhur_m = 0.5 * (ql[1] + qr[1]);
    const Scalar uphi_m = 0.5 * (ql[2] / ql[0] + qr[2] / qr[0]);

    State p;
    p[1] = (g * rh_m * deta_f - g * rh_m * excess_m * dr) * unit_normal.x;
    p[2] = rhur_m * uphi_m * dr * unit_normal.x;
    return p;
}

State osher_romberg_viscosity(const Model& mdl, const EquilibriumProfile& profile,
                              const State& ql, const State& qr,
                              const Vec3& unit_normal) {
    require_wb(mdl, profile, "osher_romberg_viscosity");
    const FaceFrame fr = face_frame(unit_normal);

    const State qfl = ql - profile.equilibrium_state(ql[4]);
    const State qfr = qr - profile.equilibrium_state(qr[4]);
    const Scalar dr = qr[4] - ql[4];
    // Path point: steady part at the interpolated radius plus the segment
    // fluctuation.  The endpoints return the traces bitwise.
    auto path = [&](Scalar s) {
        if (s == 0.0) return ql;
        if (s == 1.0) return qr;
        return profile.equilibrium_state(ql[4] + s * dr) + qfl +
               s * (qfr - qfl);
    };

    constexpr Scalar node[3] = {0.25, 0.75, 0.5};
    constexpr Scalar weight[3] = {2.0 / 3.0, 2.0 / 3.0, -1.0 / 3.0};
    constexpr Scalar halfspan[3] = {0.25, 0.25, 0.5};

    State v;
    for (int j = 0; j < 3; ++j) {
        const State qa = path(node[j] - halfspan[j]);
        const State qb = path(node[j] + halfspan[j]);
        // Full jump carried by the sub-segment: flux difference plus the
        // nonconservative jump between its end states.
        const State rj = mdl.spacetime_flux(qb, unit_normal) -
                         mdl.spacetime_flux(qa, unit_normal) +
                         noncons_jump(mdl, profile, qa, qb, unit_normal);
        v += (weight[j] / (2.0 * halfspan[j])) *
             mdl.sign_a_times(path(node[j]), fr, rj);
    }
    return v;
}

State wb_face_term(const Model& mdl, const EquilibriumProfile& profile,
                   const State& ql, const State& qr, const Vec3& unit_normal) {
    const State df = mdl.spacetime_flux(qr, unit_normal) -
                     mdl.spacetime_flux(ql, unit_normal);
    const State p = noncons_jump(mdl, profile, ql, qr, unit_normal);
    const State v = osher_romberg_viscosity(mdl, profile, ql, qr, unit_normal);
    return 0.5 * (df + p) - 0.5 * v;
}

}  // namespace alefv
