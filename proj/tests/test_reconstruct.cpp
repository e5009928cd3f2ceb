/// @file test_reconstruct.cpp
/// @brief Reconstruction tests: slope fitting, vertex limiting against a
///        bisection reference, stencil charts, and predictor rates.

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "alefv/reconstruct.hpp"
#include "alefv/spacetime.hpp"
#include "doctest.h"
#include "oracles/reconstruct_oracles.hpp"

using namespace alefv;

// ---- Slope fitting ------------------------------------------------------------

TEST_CASE("least-squares slope: reproduces linear samples exactly") {
    std::mt19937 rng(90u);
    std::uniform_real_distribution<Scalar> coef(-2.0, 2.0), pos(-1.0, 1.0);
    std::uniform_int_distribution<int> count(3, 8);
    for (int trial = 0; trial < 50; ++trial) {
        const Scalar a = coef(rng), b = coef(rng);
        const int n = count(rng);
        std::vector<Vec2> offsets(n);
        std::vector<Scalar> deltas(n);
        for (int k = 0; k < n; ++k) {
            offsets[k] = {pos(rng), pos(rng)};
            deltas[k] = a * offsets[k].x + b * offsets[k].y;
        }
        Vec2 s;
        if (!lsq_slope(offsets, deltas, s)) continue;  // degenerate draw
        CHECK(s.x == doctest::Approx(a).epsilon(1e-12).scale(1.0));
        CHECK(s.y == doctest::Approx(b).epsilon(1e-12).scale(1.0));
    }
}

TEST_CASE("least-squares slope: refuses degenerate stencils") {
    Vec2 s{9.0, 9.0};
    const std::vector<Vec2> one{{1.0, 0.5}};
    const std::vector<Scalar> dv1{0.3};
    CHECK_FALSE(lsq_slope(one, dv1, s));
    CHECK(s.x == 0.0);
    CHECK(s.y == 0.0);

    // Collinear samples span only one direction.
    const std::vector<Vec2> line{{1.0, 2.0}, {2.0, 4.0}, {-0.5, -1.0}};
    const std::vector<Scalar> dv3{0.1, 0.2, -0.05};
    CHECK_FALSE(lsq_slope(line, dv3, s));
}

// ---- Vertex limiter ------------------------------------------------------------

TEST_CASE("vertex limiter: hand values") {
    const Scalar qc = 1.0, qmin = 0.5, qmax = 1.5;
    const std::vector<Scalar> over{1.0};
    CHECK(barth_jespersen(qc, qmin, qmax, over) == doctest::Approx(0.5));
    const std::vector<Scalar> under{-1.0};
    CHECK(barth_jespersen(qc, qmin, qmax, under) == doctest::Approx(0.5));
    const std::vector<Scalar> inside{0.25, -0.25, 0.4};
    CHECK(barth_jespersen(qc, qmin, qmax, inside) == 1.0);
    const std::vector<Scalar> none{};
    CHECK(barth_jespersen(qc, qmin, qmax, none) == 1.0);
    const std::vector<Scalar> flat{0.0, 0.0};
    CHECK(barth_jespersen(qc, qc, qc, flat) == 1.0);
    // One vertex over the top, one under the bottom: the tighter cap wins.
    const std::vector<Scalar> both{2.0, -0.6};
    CHECK(barth_jespersen(qc, qmin, qmax, both) == doctest::Approx(0.25));
}

TEST_CASE("vertex limiter agrees with the bisection reference") {
    std::mt19937 rng(91u);
    std::uniform_real_distribution<Scalar> center(-1.0, 1.0), width(0.0, 2.0);
    std::uniform_real_distribution<Scalar> mag(0.05, 2.0);
    std::uniform_int_distribution<int> count(1, 8), coin(0, 1);
    for (int trial = 0; trial < 200; ++trial) {
        const Scalar qc = center(rng);
        const Scalar qmin = qc - width(rng), qmax = qc + width(rng);
        const int n = count(rng);
        std::vector<Scalar> deltas(n);
        for (int k = 0; k < n; ++k)
            deltas[k] = (coin(rng) ? 1.0 : -1.0) * mag(rng);
        const Scalar got = barth_jespersen(qc, qmin, qmax, deltas);
        const Scalar want = test::bisect_limiter(qc, qmin, qmax, deltas);
        CHECK(std::abs(got - want) <= 1e-10);
        CHECK(got >= 0.0);
        CHECK(got <= 1.0);
    }
}

// ---- Full reconstruction ---------------------------------------------------------

namespace {

struct Plane {
    Scalar a, b, c;
    Scalar operator()(const Vec2& x) const { return a * x.x + b * x.y + c; }
};

std::vector<State> plane_data(const Mesh& m, const std::vector<Plane>& planes) {
    std::vector<State> q(m.elems.size());
    for (std::size_t i = 0; i < m.elems.size(); ++i) {
        if (!m.elems[i].alive) continue;
        const Vec2 xb = m.element_barycenter(m.cur, static_cast<int>(i), 0);
        for (std::size_t v = 0; v < planes.size(); ++v) q[i][v] = planes[v](xb);
    }
    return q;
}

}  // namespace

TEST_CASE("reconstruction: linear data is reproduced on interior elements") {
    const std::vector<Plane> planes{{0.3, -0.2, 2.0}, {0.1, 0.4, 0.2}, {-0.25, 0.15, -0.1}};
    const Model mdl(ModelKind::ShallowWater, 9.81);
    for (const MeshKind kind : {MeshKind::Quads, MeshKind::Triangles,
                                MeshKind::CrissCross, MeshKind::Mixed}) {
        Mesh m = Mesh::generate_rect({0.0, 0.0}, {3.0, 3.0}, 6, 6, kind);
        const std::vector<State> q = plane_data(m, planes);
        const auto faces = build_faces(m, 0.1);
        const Reconstruction rec = reconstruct(m, m.cur, mdl, q, faces, 2);

        std::mt19937 rng(92u);
        std::uniform_real_distribution<Scalar> jitter(-0.2, 0.2);
        int tested = 0;
        for (std::size_t i = 0; i < m.elems.size(); ++i) {
            if (!m.elems[i].alive) continue;
            const Vec2 xb = rec.center[i];
            if (xb.x < 0.55 || xb.x > 2.45 || xb.y < 0.55 || xb.y > 2.45) continue;
            ++tested;
            for (int v = 0; v < 3; ++v) {
                CHECK(rec.slope_x[i][v] ==
                      doctest::Approx(planes[v].a).epsilon(1e-12).scale(1.0));
                CHECK(rec.slope_y[i][v] ==
                      doctest::Approx(planes[v].b).epsilon(1e-12).scale(1.0));
            }
            const Vec2 x{xb.x + jitter(rng), xb.y + jitter(rng)};
            const State qe = rec.evaluate(q[i], static_cast<int>(i), x, 0.0);
            for (int v = 0; v < 3; ++v)
                CHECK(qe[v] == doctest::Approx(planes[v](x)).epsilon(1e-12).scale(1.0));
        }
        CHECK(tested > 0);
    }
}

TEST_CASE("reconstruction: flux-point values stay inside the stencil bounds") {
    std::mt19937 rng(93u);
    std::uniform_real_distribution<Scalar> depth(0.5, 2.0), vel(-1.0, 1.0);
    const Model mdl(ModelKind::ShallowWater, 9.81);
    Mesh m = Mesh::generate_rect({0.0, 0.0}, {3.0, 3.0}, 6, 6, MeshKind::Quads);
    std::vector<State> q(m.elems.size());
    for (std::size_t i = 0; i < m.elems.size(); ++i) {
        const Scalar h = depth(rng);
        q[i] = {h, h * vel(rng), h * vel(rng)};
    }
    const auto faces = build_faces(m, 0.1);
    const Reconstruction rec = reconstruct(m, m.cur, mdl, q, faces, 2);

    // Rebuild the stencil bounds independently from the face list.
    std::vector<State> lo(q), hi(q);
    for (const auto& f : faces) {
        if (f.left < 0 || f.right < 0) continue;
        for (int v = 0; v < 3; ++v) {
            lo[f.left][v] = std::min(lo[f.left][v], q[f.right][v]);
            hi[f.left][v] = std::max(hi[f.left][v], q[f.right][v]);
            lo[f.right][v] = std::min(lo[f.right][v], q[f.left][v]);
            hi[f.right][v] = std::max(hi[f.right][v], q[f.left][v]);
        }
    }
    for (std::size_t i = 0; i < m.elems.size(); ++i) {
        if (!m.elems[i].alive) continue;
        const auto poly = m.element_polygon(m.cur, static_cast<int>(i), 0);
        for (std::size_t k = 0; k < poly.size(); ++k) {
            const Vec2 mid = 0.5 * (poly[k] + poly[(k + 1) % poly.size()]);
            const State qe = rec.evaluate(q[i], static_cast<int>(i), mid, 0.0);
            for (int v = 0; v < 3; ++v) {
                CHECK(qe[v] >= lo[i][v] - 1e-11);
                CHECK(qe[v] <= hi[i][v] + 1e-11);
            }
        }
    }
}

TEST_CASE("reconstruction: periodic stencils see neighbors in the wrapped chart") {
    const Model mdl(ModelKind::ShallowWater, 9.81);
    Mesh m = Mesh::generate_rect({0.0, 0.0}, {3.0, 3.0}, 3, 3, MeshKind::Quads);
    m.make_periodic_y();
    // Depth grows linearly with y as seen from the bottom row: the top row
    // plays the part of the row below the seam (its chart position is y - 3).
    std::vector<State> q(m.elems.size());
    int probe = -1;
    for (std::size_t i = 0; i < m.elems.size(); ++i) {
        if (!m.elems[i].alive) continue;
        const Vec2 xb = m.element_barycenter(m.cur, static_cast<int>(i), 0);
        const Scalar y_eff = xb.y > 2.0 ? xb.y - 3.0 : xb.y;
        q[i] = {2.0 + y_eff, 0.0, 0.0};
        if (std::abs(xb.x - 1.5) < 1e-9 && std::abs(xb.y - 0.5) < 1e-9)
            probe = static_cast<int>(i);
    }
    REQUIRE(probe >= 0);
    const auto faces = build_faces(m, 0.05);
    const Reconstruction rec = reconstruct(m, m.cur, mdl, q, faces, 2);
    // The probe element's downward neighbor lies across the seam; with the
    // wrap applied the data is a perfect plane of slope one in y.
    CHECK(rec.slope_x[probe][0] == doctest::Approx(0.0).epsilon(1e-12).scale(1.0));
    CHECK(rec.slope_y[probe][0] == doctest::Approx(1.0).epsilon(1e-12).scale(1.0));
}

TEST_CASE("reconstruction: order one keeps the means") {
    const Model mdl(ModelKind::ShallowWater, 9.81);
    Mesh m = Mesh::generate_rect({0.0, 0.0}, {2.0, 2.0}, 2, 2, MeshKind::Quads);
    std::vector<State> q(m.elems.size(), State{1.0, 0.2, -0.1});
    const auto faces = build_faces(m, 0.1);
    const Reconstruction rec = reconstruct(m, m.cur, mdl, q, faces, 1);
    CHECK(rec.slope_x.empty());
    CHECK(rec.rate.empty());
    const State qe = rec.evaluate(q[0], 0, {17.0, -4.0}, 9.0);
    for (int v = 0; v < 3; ++v) CHECK(qe[v] == q[0][v]);
}

// ---- Predictor rate ---------------------------------------------------------------

TEST_CASE("predictor rate: uniform flow on a unit square is steady") {
    const Model mdl(ModelKind::ShallowWater, 10.0);
    Mesh m = Mesh::generate_rect({0.0, 0.0}, {1.0, 1.0}, 1, 1, MeshKind::Quads);
    const State q{2.0, 0.6, -0.4};
    const State zero{};
    const State rate = predictor_rate(m, m.cur, 0, mdl, q, zero, zero);
    for (int v = 0; v < 3; ++v)
        CHECK(rate[v] == doctest::Approx(0.0).epsilon(1e-13).scale(1.0));
}

TEST_CASE("predictor rate: tilted surface accelerates the water") {
    const Model mdl(ModelKind::ShallowWater, 10.0);
    Mesh m = Mesh::generate_rect({0.0, 0.0}, {1.0, 1.0}, 1, 1, MeshKind::Quads);
    // h = 1 + 0.2 (x - 1/2), no motion: d(hu)/dt = -g h dh/dx at the center.
    const State q{1.0, 0.0, 0.0};
    const State sx{0.2, 0.0, 0.0};
    const State zero{};
    const State rate = predictor_rate(m, m.cur, 0, mdl, q, sx, zero);
    CHECK(rate[0] == 0.0);  // no mass motion anywhere on the element
    CHECK(rate[1] == doctest::Approx(-10.0 * 1.0 * 0.2).epsilon(1e-13));
    CHECK(rate[2] == doctest::Approx(0.0).epsilon(1e-14).scale(1.0));
}

TEST_CASE("predictor rate: polar models add the geometric source") {
    const Model mdl(ModelKind::Polar, 10.0);
    Mesh m = Mesh::generate_rect({1.0, 0.0}, {2.0, 1.0}, 1, 1, MeshKind::Quads);
    // Uniform state: the boundary integral cancels, leaving only the source.
    const State q{1.5, 0.9, -1.2, 1.5};  // h=1, u_r=0.6, u_phi=-0.8 at r=1.5
    const State zero{};
    const State rate = predictor_rate(m, m.cur, 0, mdl, q, zero, zero);
    const State src = mdl.source(q);
    CHECK(src[1] != 0.0);
    for (int v = 0; v < 4; ++v)
        CHECK(rate[v] == doctest::Approx(src[v]).epsilon(1e-13).scale(1.0));

    // The well-balanced sibling has no geometric source; a uniform state
    // with zero slope must be exactly steady.
    const Model wb(ModelKind::PolarWellBalanced, 10.0);
    const State qw{1.5, 0.9, -1.2, 0.45, 1.5};
    const State rw = predictor_rate(m, m.cur, 0, wb, qw, zero, zero);
    for (int v = 0; v < 5; ++v)
        CHECK(rw[v] == doctest::Approx(0.0).epsilon(1e-13).scale(1.0));
}
