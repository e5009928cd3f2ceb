/// @file spacetime.hpp
/// @brief Space-time faces between two mesh configurations: exact bilinear
///        patch vector areas, the conforming fast path, the sliding-interface
///        line sweep producing nonconforming sub-faces, periodic seam
///        matching, and the geometric closure audit.
///
/// Every moving mesh edge spans a ruled (bilinear) patch in (x, y, t) between
/// t^n and t^{n+1}. The patch's vector area — the surface integral of its unit
/// normal — has the closed form 0.5 (X3 - X1) x (X4 - X2), which also equals
/// the midpoint cross product and the sum of the two flat-triangle vector
/// areas. Summed with the bottom face (0, 0, -|T^n|) and the top face
/// (0, 0, +|T^{n+1}|), the vector areas of any element's space-time boundary
/// cancel identically, so the discrete closure (free-stream / geometric
/// conservation) holds to rounding error by construction.
#pragma once

#include <array>
#include <vector>

#include "alefv/core.hpp"
#include "alefv/mesh.hpp"

namespace alefv {

// ---- Single-patch geometry ---------------------------------------------------

/// Measures of one bilinear space-time patch.
struct SubFaceGeometry {
    Scalar area = 0.0;  ///< |vector area|
    Vec3 normal;        ///< unit space-time normal (zero when degenerate)
    Vec3 midpoint;      ///< patch center, the quadrature point
    Vec3 vector_area;   ///< exact integral of the unit normal over the patch
};

/// Corners are ordered (a at t^n, b at t^n, b at t^{n+1}, a at t^{n+1}).
/// For an edge a->b traversed with the element interior on its left, the
/// resulting normal points out of that element. Degenerate patches (all
/// corners coincident, or a collapsed segment at one level) are handled:
/// collapsed-at-one-level patches are flat triangles, fully collapsed patches
/// report zero area.
SubFaceGeometry subface_geometry(const std::array<Vec3, 4>& corners);

// ---- Space-time faces ----------------------------------------------------------

/// One lateral face of the space-time volume swept by an element, carrying
/// everything flux assembly needs. Where the mesh is conforming this is the
/// whole patch of one edge; along sliding interfaces and the periodic seam it
/// is one sub-piece of the interface with exactly one element on each side.
struct SpaceTimeFace {
    std::array<Vec3, 4> corners{};  ///< (x, y, t), t in {0, dt}
    Scalar area = 0.0;
    Vec3 normal;
    Vec3 midpoint;
    Vec3 vector_area;
    int left = -1;      ///< element the normal points out of
    int right = -1;     ///< element on the far side, -1 at boundaries
    int boundary = kEdgeInterior;  ///< side tag when right < 0
    int edge = -1;      ///< originating mesh edge (left side's edge)
    Vec2 left_offset;   ///< add to midpoint.(x,y) to evaluate left-side data
    Vec2 right_offset;  ///< add to midpoint.(x,y) to evaluate right-side data
};

/// Build the complete lateral face list of the current configuration `cur`
/// over a step of size dt. Conforming interior and boundary edges map to one
/// face each; single-owner interior edges are grouped into collinear
/// interface clusters and swept into sub-faces cut at every node on the
/// cluster line; when the y-boundaries are periodic they are matched into
/// interior faces with a +period offset on the upper side. Zero-area patches
/// are dropped. Deterministic: face order depends only on edge/element ids.
std::vector<SpaceTimeFace> build_faces(const Mesh& m, Scalar dt);

// ---- Interface clusters --------------------------------------------------------

/// A maximal connected group of collinear single-owner interior edges — one
/// sliding interface line (or a full circle when it crosses the periodic
/// seam). The frame (anchor, dir) is canonical: anchor is the position of the
/// smallest-id endpoint, dir the direction of the longest member edge with a
/// lexicographically positive sign, so cluster geometry is reproducible.
struct InterfaceCluster {
    std::vector<int> edges;
    Vec2 anchor;
    Vec2 dir;
    int level = 0;       ///< time level the frame was computed at
    bool wraps = false;  ///< closed across the periodic seam
};

/// Find all interface clusters of one table buffer at the given time level
/// (0 = t^n coordinates, 1 = t^{n+1}). Edges connect when they share a node,
/// or endpoint nodes that are periodic partners, and are collinear.
std::vector<InterfaceCluster> find_interface_clusters(const Mesh& m,
                                                      const ConnectivityTables& t,
                                                      int level);

/// Topological side of a member edge's owner relative to the cluster line:
/// +1 when the owner traverses the edge along +dir (interior on the +normal
/// side, normal = dir rotated counterclockwise), -1 otherwise.
int cluster_edge_side(const Mesh& m, const ConnectivityTables& t,
                      const InterfaceCluster& c, int e);

/// Recompute the overlap entries of edge2elem (the entries beyond the
/// owners) for every sliding-interface edge at the given time level: each
/// interface edge lists all opposite-side elements whose own edges overlap
/// its span by a positive length. Entries for conforming edges are stripped.
void refresh_overlap_adjacency(Mesh& m, ConnectivityTables& t, int level);

// ---- Closure audit ----------------------------------------------------------------

/// Worst relative space-time closure residual over live elements:
/// | sum of signed lateral vector areas + (0, 0, |T^{n+1}| - |T^n|) |
/// normalized by the largest face measure of the element.
struct ClosureReport {
    Scalar max_rel = 0.0;
    int worst_elem = -1;
};

ClosureReport closure_audit(const Mesh& m, const ConnectivityTables& t,
                            const std::vector<SpaceTimeFace>& faces);

}  // namespace alefv
