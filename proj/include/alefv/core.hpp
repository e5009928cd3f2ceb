/// @file core.hpp
/// @brief Basic scalar/vector types, the fixed-capacity state vector, and the
///        error taxonomy shared by all solver components.
#pragma once

#include <array>
#include <cmath>
#include <stdexcept>
#include <string>

namespace alefv {

using Scalar = double;

/// Maximum number of conserved variables over all shipped systems
/// (the well-balanced polar system carries five).
inline constexpr int kMaxVars = 5;

// ---- Errors ----------------------------------------------------------------

/// Base class for all solver errors.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Invalid or degenerate geometry (too few vertices, zero area, ...).
class GeometryError : public Error {
public:
    using Error::Error;
};

/// Inconsistent or unsupported mesh topology.
class TopologyError : public Error {
public:
    using Error::Error;
};

/// Loss of admissibility (dry state, non-positive depth).
class PositivityError : public Error {
public:
    using Error::Error;
};

/// Mesh became invalid during time stepping (tangled element); the driver
/// catches this to stop a run gracefully and record the final time.
class MeshInvalidError : public Error {
public:
    using Error::Error;
};

/// Bad user configuration (unknown case, out-of-range parameter, ...).
class ConfigError : public Error {
public:
    using Error::Error;
};

// ---- Small vectors ----------------------------------------------------------

struct Vec2 {
    Scalar x = 0.0;
    Scalar y = 0.0;

    constexpr Vec2() = default;
    constexpr Vec2(Scalar x_, Scalar y_) : x(x_), y(y_) {}

    constexpr Vec2 operator+(const Vec2& o) const { return {x + o.x, y + o.y}; }
    constexpr Vec2 operator-(const Vec2& o) const { return {x - o.x, y - o.y}; }
    constexpr Vec2 operator*(Scalar s) const { return {x * s, y * s}; }
    constexpr Vec2 operator/(Scalar s) const { return {x / s, y / s}; }
    constexpr Vec2 operator-() const { return {-x, -y}; }
    Vec2& operator+=(const Vec2& o) { x += o.x; y += o.y; return *this; }
    Vec2& operator-=(const Vec2& o) { x -= o.x; y -= o.y; return *this; }
    Vec2& operator*=(Scalar s) { x *= s; y *= s; return *this; }

    constexpr Scalar dot(const Vec2& o) const { return x * o.x + y * o.y; }
    /// z-component of the 3D cross product (this x o).
    constexpr Scalar cross(const Vec2& o) const { return x * o.y - y * o.x; }
    Scalar norm() const { return std::hypot(x, y); }
    constexpr Scalar norm2() const { return x * x + y * y; }
    /// Counterclockwise 90 degree rotation.
    constexpr Vec2 perp() const { return {-y, x}; }
    Vec2 normalized() const {
        const Scalar n = norm();
        return {x / n, y / n};
    }
};

inline constexpr Vec2 operator*(Scalar s, const Vec2& v) { return v * s; }

struct Vec3 {
    Scalar x = 0.0;
    Scalar y = 0.0;
    Scalar z = 0.0;

    constexpr Vec3() = default;
    constexpr Vec3(Scalar x_, Scalar y_, Scalar z_) : x(x_), y(y_), z(z_) {}

    constexpr Vec3 operator+(const Vec3& o) const { return {x + o.x, y + o.y, z + o.z}; }
    constexpr Vec3 operator-(const Vec3& o) const { return {x - o.x, y - o.y, z - o.z}; }
    constexpr Vec3 operator*(Scalar s) const { return {x * s, y * s, z * s}; }
    constexpr Vec3 operator/(Scalar s) const { return {x / s, y / s, z / s}; }
    Vec3& operator+=(const Vec3& o) { x += o.x; y += o.y; z += o.z; return *this; }

    constexpr Scalar dot(const Vec3& o) const { return x * o.x + y * o.y + z * o.z; }
    constexpr Vec3 cross(const Vec3& o) const {
        return {y * o.z - z * o.y, z * o.x - x * o.z, x * o.y - y * o.x};
    }
    Scalar norm() const { return std::sqrt(x * x + y * y + z * z); }
};

inline constexpr Vec3 operator*(Scalar s, const Vec3& v) { return v * s; }

// ---- State vector -----------------------------------------------------------

/// Fixed-capacity vector of conserved variables. All arithmetic runs over the
/// full capacity; systems with fewer variables keep the tail at zero.
struct State {
    std::array<Scalar, kMaxVars> q{};

    constexpr Scalar& operator[](int i) { return q[static_cast<std::size_t>(i)]; }
    constexpr Scalar operator[](int i) const { return q[static_cast<std::size_t>(i)]; }

    State operator+(const State& o) const {
        State r;
        for (int i = 0; i < kMaxVars; ++i) r.q[i] = q[i] + o.q[i];
        return r;
    }
    State operator-(const State& o) const {
        State r;
        for (int i = 0; i < kMaxVars; ++i) r.q[i] = q[i] - o.q[i];
        return r;
    }
    State operator*(Scalar s) const {
        State r;
        for (int i = 0; i < kMaxVars; ++i) r.q[i] = q[i] * s;
        return r;
    }
    State operator/(Scalar s) const {
        State r;
        for (int i = 0; i < kMaxVars; ++i) r.q[i] = q[i] / s;
        return r;
    }
    State& operator+=(const State& o) {
        for (int i = 0; i < kMaxVars; ++i) q[i] += o.q[i];
        return *this;
    }
    State& operator-=(const State& o) {
        for (int i = 0; i < kMaxVars; ++i) q[i] -= o.q[i];
        return *this;
    }
    State& operator*=(Scalar s) {
        for (int i = 0; i < kMaxVars; ++i) q[i] *= s;
        return *this;
    }

    Scalar max_abs() const {
        Scalar m = 0.0;
        for (int i = 0; i < kMaxVars; ++i) m = std::max(m, std::abs(q[i]));
        return m;
    }
};

inline State operator*(Scalar s, const State& v) { return v * s; }

/// Default gravitational acceleration (overridable per case).
inline constexpr Scalar kDefaultGravity = 9.81;

}  // namespace alefv
