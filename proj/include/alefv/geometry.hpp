/// @file geometry.hpp
/// @brief Planar polygon measures (area, centroid, incircle-type diameter) and
///        small line/segment utilities used by the mesh and motion modules.
#pragma once

#include <span>

#include "alefv/core.hpp"

namespace alefv {

/// Signed shoelace area of a polygon given by an ordered vertex sequence
/// (positive for counterclockwise orientation). Throws GeometryError for
/// fewer than 3 vertices.
Scalar polygon_signed_area(std::span<const Vec2> verts);

/// Absolute polygon area; throws GeometryError for fewer than 3 vertices.
Scalar polygon_area(std::span<const Vec2> verts);

/// Polygon perimeter (closed loop).
Scalar polygon_perimeter(std::span<const Vec2> verts);

/// Polygon centroid; throws GeometryError when the area vanishes.
Vec2 polygon_centroid(std::span<const Vec2> verts);

/// Incircle-type diameter 2*area/semi_perimeter, the CFL length scale.
/// Exact incircle diameter for triangles; a safe proxy for general polygons.
Scalar incircle_diameter(Scalar area, Scalar perimeter);

/// Scalar position of p along the line through `anchor` with unit direction
/// `dir`: (p - anchor) . dir.
Scalar line_param(const Vec2& p, const Vec2& anchor, const Vec2& dir);

/// Orthogonal projection of p onto the line through `anchor` with unit
/// direction `dir`, computed anchor-relative for translation robustness.
Vec2 project_to_line(const Vec2& p, const Vec2& anchor, const Vec2& dir);

/// True when point c lies on the line through a and b within `rtol` relative
/// to the segment length.
bool collinear(const Vec2& a, const Vec2& b, const Vec2& c, Scalar rtol);

}  // namespace alefv
