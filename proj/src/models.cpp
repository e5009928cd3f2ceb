/// @file models.cpp
/// @brief Shallow-water model family: fluxes, sources, nonconservative
///        products, and the analytic moving-face operator functions.

#include "alefv/models.hpp"

#include <cmath>
#include <sstream>

namespace alefv {

namespace {

Scalar sgn(Scalar x) { return x > 0.0 ? 1.0 : (x < 0.0 ? -1.0 : 0.0); }

/// Relative dead band for coalescing eigenvalues in divided differences.
constexpr Scalar kEigenTol = 1e-12;

}  // namespace

// ---- Face frame -----------------------------------------------------------

FaceFrame face_frame(const Vec3& n) {
    const Scalar s = std::hypot(n.x, n.y);
    if (!(s > 0.0))
        throw GeometryError("face_frame: space-time normal has no spatial part");
    return {{n.x / s, n.y / s}, s, -n.z / s};
}

// ---- Construction ------------------------------------------------------------

Model::Model(ModelKind kind, Scalar gravity) : kind_(kind), gravity_(gravity) {
    if (!(gravity > 0.0))
        throw ConfigError("model: gravity must be positive, got " +
                          std::to_string(gravity));
    switch (kind) {
        case ModelKind::ShallowWater:
            nvars_ = 3;
            var_names_ = {"h", "hu", "hv"};
            break;
        case ModelKind::ShallowWaterTracer:
            nvars_ = 4;
            var_names_ = {"h", "hu", "hv", "hc"};
            break;
        case ModelKind::Polar:
            nvars_ = 4;
            var_names_ = {"rh", "rhur", "rhuphi", "r"};
            break;
        case ModelKind::PolarWellBalanced:
            nvars_ = 5;
            var_names_ = {"rh", "rhur", "rhuphi", "rb", "r"};
            break;
    }
}

// ---- Physics ------------------------------------------------------------------

State Model::flux_x(const State& q) const {
    State f;
    switch (kind_) {
        case ModelKind::ShallowWater:
        case ModelKind::ShallowWaterTracer: {
            const Scalar u = q[1] / q[0];
            f[0] = q[1];
            f[1] = q[1] * u + 0.5 * gravity_ * q[0] * q[0];
            f[2] = q[2] * u;
            if (kind_ == ModelKind::ShallowWaterTracer) f[3] = q[3] * u;
            break;
        }
        case ModelKind::Polar: {
            const Scalar ur = q[1] / q[0];
            f[0] = q[1];
            f[1] = q[1] * ur + 0.5 * gravity_ * q[0] * q[0] / q[3];
            f[2] = q[2] * ur;
            break;
        }
        case ModelKind::PolarWellBalanced: {
            // The radial pressure gradient lives in the nonconservative
            // product so that equilibria cancel path-exactly.
            const Scalar ur = q[1] / q[0];
            f[0] = q[1];
            f[1] = q[1] * ur;
            f[2] = q[2] * ur;
            break;
        }
    }
    return f;
}

State Model::flux_y(const State& q) const {
    State f;
    switch (kind_) {
        case ModelKind::ShallowWater:
        case ModelKind::ShallowWaterTracer: {
            const Scalar v = q[2] / q[0];
            f[0] = q[2];
            f[1] = q[1] * v;
            f[2] = q[2] * v + 0.5 * gravity_ * q[0] * q[0];
            if (kind_ == ModelKind::ShallowWaterTracer) f[3] = q[3] * v;
            break;
        }
        case ModelKind::Polar:
        case ModelKind::PolarWellBalanced: {
            const Scalar r = kind_ == ModelKind::Polar ? q[3] : q[4];
            const Scalar h = q[0] / r;
            const Scalar uphi = q[2] / q[0];
            f[0] = h * uphi;
            f[1] = (q[1] / q[0]) * h * uphi;
            f[2] = h * uphi * uphi + 0.5 * gravity_ * h * h;
            break;
        }
    }
    return f;
}

State Model::source(const State& q) const {
    State src;
    if (kind_ != ModelKind::Polar) return src;
    const Scalar r = q[3];
    const Scalar h = q[0] / r;
    const Scalar ur = q[1] / q[0];
    const Scalar uphi = q[2] / q[0];
    src[1] = h * uphi * uphi + 0.5 * gravity_ * h * h;
    src[2] = -h * ur * uphi;
    return src;
}

State Model::noncons_product(const State& q, const Vec2& n_hat,
                             const State& dq) const {
    State p;
    if (kind_ != ModelKind::PolarWellBalanced) return p;
    const Scalar r = q[4];
    const Scalar h = q[0] / r;
    const Scalar eta = (q[0] + q[3]) / r;  // free surface h + b
    const Scalar ur = q[1] / q[0];
    const Scalar uphi = q[2] / q[0];
    const Scalar g = gravity_;
    p[1] = (g * h * (dq[0] + dq[3]) + (-g * h * eta - h * uphi * uphi) * dq[4]) * n_hat.x;
    p[2] = (h * ur * uphi * dq[4]) * n_hat.x;
    return p;
}

State Model::spacetime_flux(const State& q, const Vec3& ntilde) const {
    return flux_x(q) * ntilde.x + flux_y(q) * ntilde.y + q * ntilde.z;
}

// ---- Primitives ------------------------------------------------------------------

Scalar Model::depth(const State& q) const {
    switch (kind_) {
        case ModelKind::Polar:
            return q[0] / q[3];
        case ModelKind::PolarWellBalanced:
            return q[0] / q[4];
        default:
            return q[0];
    }
}

Vec2 Model::chart_velocity(const State& q) const {
    const Vec2 u{q[1] / q[0], q[2] / q[0]};
    if (!is_polar()) return u;
    const Scalar r = kind_ == ModelKind::Polar ? q[3] : q[4];
    return {u.x, u.y / r};
}

Scalar Model::celerity(const State& q) const { return std::sqrt(gravity_ * depth(q)); }

Scalar Model::max_signal_speed(const State& q) const {
    const Scalar c = celerity(q);
    if (!is_polar()) return chart_velocity(q).norm() + c;
    const Scalar r = kind_ == ModelKind::Polar ? q[3] : q[4];
    return chart_velocity(q).norm() + c * std::max(1.0, 1.0 / r);
}

void Model::check_admissible(const State& q, const std::string& where) const {
    const Scalar h = depth(q);
    if (!(h > 0.0)) {
        std::ostringstream os;
        os << where << ": non-positive depth h = " << h;
        throw PositivityError(os.str());
    }
    if (is_polar()) {
        const Scalar r = kind_ == ModelKind::Polar ? q[3] : q[4];
        if (!(r > 0.0)) {
            std::ostringstream os;
            os << where << ": non-positive radius r = " << r;
            throw PositivityError(os.str());
        }
    }
}

// ---- Face operator -------------------------------------------------------------

State Model::abs_a_times(const State& q, const FaceFrame& fr, const State& dq) const {
    return apply_face_fn(q, fr, dq, MatFn::Abs);
}

State Model::sign_a_times(const State& q, const FaceFrame& fr, const State& dq) const {
    return apply_face_fn(q, fr, dq, MatFn::Sign);
}

Scalar Model::max_face_eigen(const State& q, const FaceFrame& fr) const {
    check_admissible(q, "max_face_eigen");
    const Scalar r = kind_ == ModelKind::Polar ? q[3]
                     : kind_ == ModelKind::PolarWellBalanced ? q[4]
                                                             : 1.0;
    const Vec2 u{q[1] / q[0], q[2] / q[0]};
    const Vec2 kappa = is_polar() ? Vec2{fr.n_hat.x, fr.n_hat.y / r} : fr.n_hat;
    const Scalar m = u.dot(kappa);
    const Scalar ckl = celerity(q) * kappa.norm();
    Scalar e = std::max(std::abs(fr.s * (m - ckl - fr.omega)),
                        std::abs(fr.s * (m + ckl - fr.omega)));
    if (is_polar()) e = std::max(e, std::abs(fr.s * fr.omega));
    return e;
}

State Model::apply_face_fn(const State& q, const FaceFrame& fr, const State& dq,
                           MatFn fn) const {
    check_admissible(q, "face operator");
    const Scalar g = gravity_;
    const Scalar s = fr.s;
    const Scalar w = fr.omega;
    const Scalar r = kind_ == ModelKind::Polar ? q[3]
                     : kind_ == ModelKind::PolarWellBalanced ? q[4]
                                                             : 1.0;
    const Scalar h = q[0] / r;
    const Vec2 u{q[1] / q[0], q[2] / q[0]};  // (u, v) or (u_r, u_phi)
    const Scalar c = std::sqrt(g * h);
    const Vec2 kappa = is_polar() ? Vec2{fr.n_hat.x, fr.n_hat.y / r} : fr.n_hat;
    const Scalar kl = kappa.norm();
    const Vec2 kh = kappa / kl;
    const Vec2 th = kh.perp();
    const Scalar m = u.dot(kappa);

    // Core eigenvalues of the kappa-contracted shallow-water block, and the
    // requested function of the face-scaled eigenvalues s (lambda - omega).
    const Scalar lam[3] = {m - c * kl, m, m + c * kl};
    auto face_fn = [&](Scalar lam_core) {
        const Scalar mu = s * (lam_core - w);
        return fn == MatFn::Abs ? std::abs(mu) : sgn(mu);
    };

    // Wave decomposition in the shallow-water basis r1/r3 = (1, u -+ c kh),
    // r2 = (0, perp(kh)): apply a per-wave factor and recompose.
    struct Waves {
        Scalar a1, a2, a3;
    };
    auto decompose = [&](Scalar d0, Scalar d1, Scalar d2) {
        const Vec2 wv{d1 - u.x * d0, d2 - u.y * d0};
        const Scalar diff = kh.dot(wv) / c;
        return Waves{0.5 * (d0 - diff), th.dot(wv), 0.5 * (d0 + diff)};
    };
    auto recompose = [&](const Waves& wv, Scalar f1, Scalar f2, Scalar f3,
                         Scalar out[3]) {
        const Scalar b1 = f1 * wv.a1, b2 = f2 * wv.a2, b3 = f3 * wv.a3;
        out[0] = b1 + b3;
        out[1] = b1 * (u.x - c * kh.x) - b2 * kh.y + b3 * (u.x + c * kh.x);
        out[2] = b1 * (u.y - c * kh.y) + b2 * kh.x + b3 * (u.y + c * kh.y);
    };

    State out;
    const Waves wq = decompose(dq[0], dq[1], dq[2]);
    Scalar core[3];
    recompose(wq, face_fn(lam[0]), face_fn(lam[1]), face_fn(lam[2]), core);
    out[0] = core[0];
    out[1] = core[1];
    out[2] = core[2];

    if (kind_ == ModelKind::ShallowWater) return out;

    const Scalar scale = c * kl + std::abs(m) + std::abs(w) + 1e-300;

    if (kind_ == ModelKind::ShallowWaterTracer) {
        // Lower-triangular block: the tracer row advects at d = s (u.n - w);
        // its coupling to the core is the divided difference phi across d.
        const Scalar un = u.dot(fr.n_hat);
        const Scalar d = s * (un - w);
        const Scalar fd = fn == MatFn::Abs ? std::abs(d) : sgn(d);
        const Scalar ct = q[3] / q[0];
        auto phi = [&](Scalar lam_core) {
            const Scalar mu = s * (lam_core - w);
            if (std::abs(mu - d) <= kEigenTol * s * scale)
                return fn == MatFn::Abs ? sgn(d) : 0.0;
            return (face_fn(lam_core) - fd) / (mu - d);
        };
        Scalar v3[3];
        recompose(wq, phi(lam[0]), phi(lam[1]), phi(lam[2]), v3);
        out[3] = s * ct * (-un * v3[0] + fr.n_hat.x * v3[1] + fr.n_hat.y * v3[2]) +
                 fd * dq[3];
        return out;
    }

    // Polar systems: the trailing rows are transported with the face
    // (eigenvalue -s w) and couple into the core through columns handled by
    // the divided difference psi between the core eigenvalues and -s w.
    const Scalar ftriv = fn == MatFn::Abs ? std::abs(s * w) : sgn(-s * w);
    auto psi = [&](Scalar lam_core) {
        if (std::abs(lam_core) <= kEigenTol * scale)
            return fn == MatFn::Abs ? s * sgn(-w) : 0.0;
        return (face_fn(lam_core) - ftriv) / lam_core;
    };
    const Scalar ps[3] = {psi(lam[0]), psi(lam[1]), psi(lam[2])};
    auto add_column = [&](const Scalar col[3], Scalar weight) {
        const Waves wc = decompose(col[0], col[1], col[2]);
        Scalar y[3];
        recompose(wc, ps[0], ps[1], ps[2], y);
        out[0] += weight * y[0];
        out[1] += weight * y[1];
        out[2] += weight * y[2];
    };

    const Scalar k2 = kappa.y;
    if (kind_ == ModelKind::Polar) {
        const Scalar c4[3] = {-h * u.y * k2,
                              -0.5 * g * h * h * kappa.x - h * u.x * u.y * k2,
                              -(h * u.y * u.y + g * h * h) * k2};
        add_column(c4, dq[3]);
        out[3] = ftriv * dq[3];
        return out;
    }

    // Well-balanced system: columns for the bottom field r b and the radius r.
    const Scalar eta = (q[0] + q[3]) / r;
    const Scalar c4[3] = {0.0, g * h * fr.n_hat.x, 0.0};
    const Scalar c5[3] = {-h * u.y * k2,
                          (-g * h * eta - h * u.y * u.y) * fr.n_hat.x -
                              h * u.x * u.y * k2,
                          h * u.x * u.y * fr.n_hat.x -
                              (h * u.y * u.y + g * h * h) * k2};
    add_column(c4, dq[3]);
    add_column(c5, dq[4]);
    out[3] = ftriv * dq[3];
    out[4] = ftriv * dq[4];
    return out;
}

}  // namespace alefv
