/// @file geometry.cpp
/// @brief Implementation of planar polygon measures and line utilities.

#include "alefv/geometry.hpp"

#include <cmath>

namespace alefv {

Scalar polygon_signed_area(std::span<const Vec2> verts) {
    if (verts.size() < 3) {
        throw GeometryError("polygon_signed_area: need at least 3 vertices, got " +
                            std::to_string(verts.size()));
    }
    // Shoelace about the first vertex; working with offsets keeps the sum
    // well-conditioned for polygons far from the origin.
    const Vec2 o = verts[0];
    Scalar twice = 0.0;
    for (std::size_t j = 1; j + 1 < verts.size(); ++j) {
        twice += (verts[j] - o).cross(verts[j + 1] - o);
    }
    return 0.5 * twice;
}

Scalar polygon_area(std::span<const Vec2> verts) {
    return std::abs(polygon_signed_area(verts));
}

Scalar polygon_perimeter(std::span<const Vec2> verts) {
    if (verts.size() < 2) {
        throw GeometryError("polygon_perimeter: need at least 2 vertices");
    }
    Scalar p = 0.0;
    for (std::size_t j = 0; j < verts.size(); ++j) {
        const std::size_t k = (j + 1) % verts.size();
        p += (verts[k] - verts[j]).norm();
    }
    return p;
}

Vec2 polygon_centroid(std::span<const Vec2> verts) {
    const Scalar a = polygon_signed_area(verts);
    if (a == 0.0) {
        throw GeometryError("polygon_centroid: polygon has zero area");
    }
    const Vec2 o = verts[0];
    Scalar cx = 0.0;
    Scalar cy = 0.0;
    for (std::size_t j = 0; j < verts.size(); ++j) {
        const std::size_t k = (j + 1) % verts.size();
        const Vec2 u = verts[j] - o;
        const Vec2 v = verts[k] - o;
        const Scalar w = u.cross(v);
        cx += (u.x + v.x) * w;
        cy += (u.y + v.y) * w;
    }
    return {o.x + cx / (6.0 * a), o.y + cy / (6.0 * a)};
}

Scalar incircle_diameter(Scalar area, Scalar perimeter) {
    if (area <= 0.0 || perimeter <= 0.0) {
        throw GeometryError("incircle_diameter: non-positive area or perimeter");
    }
    return 4.0 * area / perimeter;  // = 2*area / semi-perimeter
}

Scalar line_param(const Vec2& p, const Vec2& anchor, const Vec2& dir) {
    return (p - anchor).dot(dir);
}

Vec2 project_to_line(const Vec2& p, const Vec2& anchor, const Vec2& dir) {
    // Subtract the normal component rather than rebuilding from the tangential
    // one: points already on the line come back bitwise unchanged.
    const Vec2 n = dir.perp();
    return p - (p - anchor).dot(n) * n;
}

bool collinear(const Vec2& a, const Vec2& b, const Vec2& c, Scalar rtol) {
    const Vec2 ab = b - a;
    const Scalar len = ab.norm();
    if (len == 0.0) return true;
    return std::abs(ab.cross(c - a)) <= rtol * len * std::max(len, (c - a).norm());
}

}  // namespace alefv
