/// @file model_oracles.hpp
/// @brief Independent references for the model module: hand-differentiated
///        dense face Jacobians (entry by entry, no wave decomposition),
///        matrix sign/abs via the scaled Newton iteration, and Richardson
///        finite differences of the library space-time fluxes.
#pragma once

#include <Eigen/Dense>
#include <cmath>

#include "alefv/models.hpp"

namespace alefv::test {

using Mat = Eigen::MatrixXd;

/// Flux Jacobian contracted with a spatial direction n (not necessarily
/// unit), differentiated by hand per model.
inline Mat flux_jacobian(const Model& mdl, const State& q, const Vec2& n) {
    const int nv = mdl.nvars();
    const Scalar g = mdl.gravity();
    Mat j = Mat::Zero(nv, nv);
    switch (mdl.kind()) {
        case ModelKind::ShallowWater:
        case ModelKind::ShallowWaterTracer: {
            const Scalar u = q[1] / q[0], v = q[2] / q[0], gh = g * q[0];
            j(0, 1) = n.x;
            j(0, 2) = n.y;
            j(1, 0) = (gh - u * u) * n.x - u * v * n.y;
            j(1, 1) = 2 * u * n.x + v * n.y;
            j(1, 2) = u * n.y;
            j(2, 0) = -u * v * n.x + (gh - v * v) * n.y;
            j(2, 1) = v * n.x;
            j(2, 2) = u * n.x + 2 * v * n.y;
            if (mdl.kind() == ModelKind::ShallowWaterTracer) {
                const Scalar ct = q[3] / q[0], un = u * n.x + v * n.y;
                j(3, 0) = -ct * un;
                j(3, 1) = ct * n.x;
                j(3, 2) = ct * n.y;
                j(3, 3) = un;
            }
            break;
        }
        case ModelKind::Polar: {
            const Scalar r = q[3], h = q[0] / r;
            const Scalar ur = q[1] / q[0], up = q[2] / q[0], gh = g * h;
            j(0, 1) = n.x;
            j(0, 2) = n.y / r;
            j(0, 3) = -h * up / r * n.y;
            j(1, 0) = (gh - ur * ur) * n.x - ur * up / r * n.y;
            j(1, 1) = 2 * ur * n.x + up / r * n.y;
            j(1, 2) = ur / r * n.y;
            j(1, 3) = -0.5 * g * h * h * n.x - h * ur * up / r * n.y;
            j(2, 0) = -ur * up * n.x + (gh - up * up) / r * n.y;
            j(2, 1) = up * n.x;
            j(2, 2) = ur * n.x + 2 * up / r * n.y;
            j(2, 3) = -(h * up * up + g * h * h) / r * n.y;
            break;
        }
        case ModelKind::PolarWellBalanced: {
            const Scalar r = q[4], h = q[0] / r;
            const Scalar ur = q[1] / q[0], up = q[2] / q[0], gh = g * h;
            j(0, 1) = n.x;
            j(0, 2) = n.y / r;
            j(0, 4) = -h * up / r * n.y;
            j(1, 0) = -ur * ur * n.x - ur * up / r * n.y;
            j(1, 1) = 2 * ur * n.x + up / r * n.y;
            j(1, 2) = ur / r * n.y;
            j(1, 4) = -h * ur * up / r * n.y;
            j(2, 0) = -ur * up * n.x + (gh - up * up) / r * n.y;
            j(2, 1) = up * n.x;
            j(2, 2) = ur * n.x + 2 * up / r * n.y;
            j(2, 4) = -(h * up * up + g * h * h) / r * n.y;
            break;
        }
    }
    return j;
}

/// Nonconservative pairing matrix contracted with the spatial direction
/// (zero except for the well-balanced polar system).
inline Mat noncons_matrix(const Model& mdl, const State& q, const Vec2& n) {
    const int nv = mdl.nvars();
    Mat b = Mat::Zero(nv, nv);
    if (mdl.kind() != ModelKind::PolarWellBalanced) return b;
    const Scalar g = mdl.gravity();
    const Scalar r = q[4], h = q[0] / r;
    const Scalar ur = q[1] / q[0], up = q[2] / q[0];
    const Scalar gh = g * h, eta = (q[0] + q[3]) / r;
    b(1, 0) = gh * n.x;
    b(1, 3) = gh * n.x;
    b(1, 4) = (-gh * eta - h * up * up) * n.x;
    b(2, 4) = h * ur * up * n.x;
    return b;
}

/// Dense face matrix  s * (dF/dq . n_hat + B . n_hat - omega I)  whose
/// absolute value / sign the library computes through wave decompositions.
inline Mat face_matrix(const Model& mdl, const State& q, const FaceFrame& fr) {
    const Mat j = flux_jacobian(mdl, q, fr.n_hat) + noncons_matrix(mdl, q, fr.n_hat);
    return fr.s * (j - fr.omega * Mat::Identity(mdl.nvars(), mdl.nvars()));
}

/// Matrix sign function by the determinant-scaled Newton iteration
/// X <- (mu X + (mu X)^-1) / 2.  Needs no eigenvector basis, so it also
/// handles matrices with repeated eigenvalues; requires no eigenvalue on
/// the imaginary axis (callers keep eigenvalues away from zero).
inline Mat matrix_sign(Mat x) {
    const int n = static_cast<int>(x.rows());
    for (int it = 0; it < 100; ++it) {
        const Scalar det = std::abs(x.determinant());
        const Scalar mu = det > 0 ? std::pow(det, -1.0 / n) : 1.0;
        const Mat xs = mu * x;
        const Mat xn = 0.5 * (xs + xs.inverse());
        const Scalar delta = (xn - xs).norm();
        x = xn;
        if (delta <= 1e-14 * xn.norm()) break;
    }
    return x;
}

/// Matrix absolute value through the sign function: |A| = sign(A) A.
inline Mat matrix_abs(const Mat& a) { return matrix_sign(a) * a; }

/// Richardson-extrapolated central differences of the library space-time
/// flux; reproduces the flux part of face_matrix (not the B term).
inline Mat fd_face_matrix(const Model& mdl, const State& q, const FaceFrame& fr) {
    const int nv = mdl.nvars();
    const Vec3 ntilde{fr.s * fr.n_hat.x, fr.s * fr.n_hat.y, -fr.s * fr.omega};
    Mat a = Mat::Zero(nv, nv);
    for (int col = 0; col < nv; ++col) {
        auto diff = [&](Scalar eps) {
            State qp = q, qm = q;
            qp[col] += eps;
            qm[col] -= eps;
            const State fp = mdl.spacetime_flux(qp, ntilde);
            const State fm = mdl.spacetime_flux(qm, ntilde);
            State d;
            for (int i = 0; i < nv; ++i) d[i] = (fp[i] - fm[i]) / (2 * eps);
            return d;
        };
        const Scalar eps = 1e-5 * std::max(1.0, std::abs(q[col]));
        const State d1 = diff(eps), d2 = diff(0.5 * eps);
        for (int i = 0; i < nv; ++i) a(i, col) = (4 * d2[i] - d1[i]) / 3;
    }
    return a;
}

/// Spectral radius through Eigen's general eigenvalue solver.
inline Scalar spectral_radius(const Mat& a) {
    return Eigen::EigenSolver<Mat>(a, false).eigenvalues().cwiseAbs().maxCoeff();
}

}  // namespace alefv::test
