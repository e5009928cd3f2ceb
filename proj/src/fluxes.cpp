/// @file fluxes.cpp
/// @brief Rusanov and segment-path Osher fluxes on space-time faces.

#include "alefv/fluxes.hpp"

#include <string>

namespace alefv {

namespace {

// ---- Shared pieces ----------------------------------------------------------

// 3-point Gauss–Legendre rule on [0, 1].
constexpr Scalar kGlHalfSpan = 0.3872983346207417;  // ½·√(3/5)
constexpr Scalar kGlNode[3] = {0.5 - kGlHalfSpan, 0.5, 0.5 + kGlHalfSpan};
constexpr Scalar kGlWeight[3] = {5.0 / 18.0, 8.0 / 18.0, 5.0 / 18.0};

void require_conservative(const Model& mdl, const char* name) {
    if (mdl.has_nonconservative()) {
        throw ConfigError(std::string(name) +
                          " flux handles conservative models only; the "
                          "well-balanced model needs the path-conservative "
                          "osher-romberg update");
    }
}

State central_flux(const Model& mdl, const State& ql, const State& qr,
                   const Vec3& n) {
    return 0.5 * (mdl.spacetime_flux(ql, n) + mdl.spacetime_flux(qr, n));
}

}  // namespace

// ---- Rusanov ----------------------------------------------------------------

State rusanov_flux(const Model& mdl, const State& ql, const State& qr,
                   const Vec3& n) {
    require_conservative(mdl, "rusanov");
    const FaceFrame fr = face_frame(n);
    const Scalar smax =
        std::max(mdl.max_face_eigen(ql, fr), mdl.max_face_eigen(qr, fr));
    return central_flux(mdl, ql, qr, n) - 0.5 * smax * (qr - ql);
}

// ---- Osher ------------------------------------------------------------------

State osher_flux(const Model& mdl, const State& ql, const State& qr,
                 const Vec3& n) {
    require_conservative(mdl, "osher");
    const FaceFrame fr = face_frame(n);
    const State dq = qr - ql;

    State f = central_flux(mdl, ql, qr, n);
    for (int j = 0; j < 3; ++j) {
        // Path states are convex combinations of the admissible traces, so
        // depth (and radius) stay positive and the wave decomposition is
        // always available.
        const State qs = ql + kGlNode[j] * dq;
        f -= 0.5 * kGlWeight[j] * mdl.abs_a_times(qs, fr, dq);
    }
    return f;
}

// ---- Dispatch ----------------------------------------------------------------

State face_flux(const Model& mdl, FluxKind kind, const State& ql,
                const State& qr, const Vec3& n) {
    switch (kind) {
        case FluxKind::Rusanov:
            return rusanov_flux(mdl, ql, qr, n);
        case FluxKind::Osher:
            return osher_flux(mdl, ql, qr, n);
        case FluxKind::OsherRomberg:
            break;
    }
    throw ConfigError(
        "osher-romberg is a path-conservative update, not a conservative "
        "face flux; use the well-balanced assembly");
}

}  // namespace alefv
