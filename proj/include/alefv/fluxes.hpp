/// @file fluxes.hpp
/// @brief Numerical fluxes on moving space-time sub-faces: Rusanov and the
///        segment-path Osher flux with Gauss–Legendre path quadrature.

#pragma once

#include "alefv/core.hpp"
#include "alefv/models.hpp"

namespace alefv {

/// Face dissipation family. OsherRomberg belongs to the path-conservative
/// well-balanced assembly and is rejected by the conservative entry points.
enum class FluxKind { Rusanov, Osher, OsherRomberg };

/// Central space-time flux minus scalar dissipation
///   ½(F(qr)+F(ql))·ñ − ½ s_max (qr − ql),
/// s_max being the largest face eigenvalue magnitude of either state.
/// The returned vector is per unit face area (multiply by the sub-face area).
State rusanov_flux(const Model& mdl, const State& ql, const State& qr,
                   const Vec3& unit_normal);

/// Central space-time flux minus matrix dissipation
///   ½(F(qr)+F(ql))·ñ − ½ (∫ |A_n(Ψ(s))| ds) (qr − ql)
/// along the segment path Ψ(s) = ql + s (qr − ql), integrated by 3-point
/// Gauss–Legendre.  Vanishes identically across isolated contacts riding a
/// face that moves with the flow.
State osher_flux(const Model& mdl, const State& ql, const State& qr,
                 const Vec3& unit_normal);

/// Dispatch on the flux kind (conservative kinds only).
State face_flux(const Model& mdl, FluxKind kind, const State& ql,
                const State& qr, const Vec3& unit_normal);

}  // namespace alefv
