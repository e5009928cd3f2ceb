/// @file detector.hpp
/// @brief Shear-interface detector: marks edges whose tangential-velocity
///        jump exceeds a mesh-quality threshold and partitions the Voronoi
///        neighborhoods of interface nodes into the two sliding sides.

#pragma once

#include <vector>

#include "alefv/mesh.hpp"

namespace alefv {

// ---- Marking result ---------------------------------------------------------

/// Everything the node-motion stage needs to know about this step's shear
/// interfaces. Nodes queued for doubling carry the partition of their
/// Voronoi elements into the two sides of the interface line through them.
struct InterfaceMarking {
    std::vector<char> edge_marked;   ///< indexed by edge id
    std::vector<int> marked_edges;   ///< ascending list of marked edge ids

    std::vector<int> nodes_to_double;            ///< ascending node ids
    std::vector<std::vector<int>> side_left;     ///< parallel to nodes_to_double
    std::vector<std::vector<int>> side_right;    ///< parallel to nodes_to_double
    std::vector<Vec2> interface_dir;             ///< unit line direction per node

    bool empty() const { return marked_edges.empty(); }
};

// ---- Threshold pieces ----------------------------------------------------------

/// Shape ratio rho_i / ||J_i||_F: inradius (two areas over perimeter) over
/// the Frobenius norm of the unit-reference-to-element Jacobian (affine for
/// triangles, bilinear center for quadrilaterals, the (barycenter, v0, v1)
/// triangle for general polygons). Scale-invariant: 1/(2*sqrt(2)) for any
/// square, smaller for sheared or stretched cells, so a mesh degrading under
/// differential rotation lowers its own marking threshold.
Scalar element_shape_ratio(const Mesh& m, const ConnectivityTables& t, int elem);

/// Edge threshold kappa_e = min over the edge's two endpoints of
/// kappa_j = max over the node's Voronoi elements of alpha * shape ratio.
Scalar edge_threshold(const Mesh& m, const ConnectivityTables& t, int e,
                      Scalar alpha);

/// Area-weighted relative tangential jump
///   |v_ta |Ta| - v_tb |Tb|| / (|v_ta| |Ta| + |v_tb| |Tb| + 1e-14)
/// with v_t the velocity projected on the unit edge tangent. Always in [0, 1).
Scalar tangential_jump(const Vec2& tangent, const Vec2& va, const Vec2& vb,
                       Scalar area_a, Scalar area_b);

// ---- Detection -------------------------------------------------------------------

/// Mark every edge where some pair of adjacent elements on opposite sides
/// jumps past the threshold, then queue every node whose Voronoi list holds
/// elements on both sides of a marked edge line through it. The two loops
/// run sequentially, not nested. Velocities are per-element chart velocities
/// of whatever field drives the mesh motion.
InterfaceMarking detect(const Mesh& m, const ConnectivityTables& t,
                        const std::vector<Vec2>& elem_velocity, Scalar alpha);

}  // namespace alefv
