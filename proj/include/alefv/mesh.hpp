/// @file mesh.hpp
/// @brief Dynamic nonconforming polygonal mesh: node records at two time
///        levels, dual-buffered connectivity tables, index recycling,
///        structured generators, validation, and a text dump format.
///
/// Table semantics (all rows are growable integer lists):
///   tri[i]         counterclockwise true-vertex loop of element i
///   elem2edge[i]   boundary edges of element i, aligned with tri[i] so that
///                  entry k joins tri[i][k] and tri[i][k+1]
///   edge2elem[e]   all elements adjacent to edge e: its owners first, then
///                  elements whose own collinear edges overlap e's span
///                  (nonconforming interfaces can have more than two entries)
///   edge2vertex[e] the two endpoints first, then intermediate (hanging)
///                  nodes ordered along the edge
///   vertex2edge[k] edges containing node k as endpoint or intermediate
///   vertex2elem[k] elements having node k as a true vertex
///
/// Two buffers are kept: `cur` describes the interval [t^n, t^{n+1}] and is
/// what flux assembly sees; node insertion edits both buffers, node fusion
/// edits only `next`. commit() makes `next` current and recycles freed ids.
#pragma once

#include <array>
#include <iosfwd>
#include <set>
#include <string>
#include <vector>

#include "alefv/core.hpp"

namespace alefv {

// ---- Records -----------------------------------------------------------------

enum class NodeLabel : int { Regular = 0, Hanging = 1, Dead = 2 };

/// Domain-side bitmask for boundary classification of nodes.
enum BoundarySide : unsigned {
    kSideXMin = 1u,
    kSideXMax = 2u,
    kSideYMin = 4u,
    kSideYMax = 8u,
};

struct NodeRecord {
    Vec2 coords_old;          ///< position at t^n
    Vec2 coords_new;          ///< position at t^{n+1}
    NodeLabel label = NodeLabel::Regular;
    int host_edge = -1;       ///< host edge index when label == Hanging
    Vec2 host_lift;           ///< offset added to coords to reach the host
                              ///< edge's coordinate frame (periodic wrap)
    bool alive = false;
    bool pending_dead = false;  ///< fused away this step; freed at commit()
    unsigned sides = 0;       ///< BoundarySide bits
    int pair_up = -1;         ///< periodic partner at +period (or -1)
    int pair_down = -1;       ///< periodic partner at -period (or -1)
};

struct EdgeRecord {
    bool alive = false;
    bool pending_dead = false;
    int boundary = -1;  ///< -1 interior, else one of kSide* as a side index 0..3
};

struct ElementRecord {
    bool alive = false;
};

/// Side index helpers for EdgeRecord::boundary. kEdgeExposed marks sub-face
/// remainders of a sliding interface that lost their partner (treated as
/// transmissive by the driver).
enum : int {
    kEdgeInterior = -1,
    kEdgeXMin = 0,
    kEdgeXMax = 1,
    kEdgeYMin = 2,
    kEdgeYMax = 3,
    kEdgeExposed = 4,
};

// ---- Connectivity tables -------------------------------------------------------

struct ConnectivityTables {
    std::vector<std::vector<int>> tri;
    std::vector<std::vector<int>> elem2edge;
    std::vector<std::vector<int>> edge2elem;
    std::vector<std::vector<int>> edge2vertex;
    std::vector<std::vector<int>> vertex2edge;
    std::vector<std::vector<int>> vertex2elem;
};

/// Owning element of an edge together with the traversal direction of the
/// edge's endpoints inside the element's counterclockwise loop.
struct EdgeOwner {
    int elem = -1;
    bool forward = true;  ///< element loop visits (endpoint0, endpoint1) in order
};

enum class MeshKind { Quads, Triangles, Mixed, CrissCross };

// ---- Mesh -----------------------------------------------------------------------

class Mesh {
public:
    std::vector<NodeRecord> nodes;
    std::vector<EdgeRecord> edges;
    std::vector<ElementRecord> elems;
    ConnectivityTables cur;   ///< valid over [t^n, t^{n+1}]
    ConnectivityTables next;  ///< fusion edits land here only

    /// Domain bounding box at generation time (used for boundary tags).
    Vec2 domain_lo, domain_hi;
    /// Period in y when the y-boundaries are identified (0 = not periodic).
    Scalar period_y = 0.0;

    // -- Generation ------------------------------------------------------------

    /// Structured conforming mesh of the rectangle [lo, hi] with nx-by-ny
    /// cells of the requested kind. Throws ConfigError for non-positive sizes.
    static Mesh generate_rect(const Vec2& lo, const Vec2& hi, int nx, int ny,
                              MeshKind kind);

    /// Identify the y-boundaries as periodic partners: pairs every node on
    /// y = lo.y with the node at the same x on y = hi.y. Must be called on a
    /// freshly generated mesh.
    void make_periodic_y();

    // -- Index allocation --------------------------------------------------------

    /// Smallest unused node index; grows all node-indexed rows in both buffers.
    int allocate_node();
    /// Smallest unused edge index; grows all edge-indexed rows in both buffers.
    int allocate_edge();

    /// Mark a node as fused away: stripped from `next` already by the caller;
    /// the id is recycled at commit().
    void retire_node(int k);
    void retire_edge(int e);

    // -- Step lifecycle -----------------------------------------------------------

    /// Make `next` current, advance coords_old to coords_new, free retired ids.
    void commit();

    // -- Queries -------------------------------------------------------------------

    int num_live_nodes() const;
    int num_live_edges() const;
    int num_live_elems() const;

    /// Endpoints of edge e (first two entries of edge2vertex).
    std::array<int, 2> edge_endpoints(const ConnectivityTables& t, int e) const;

    /// Elements listing e among their boundary edges (1 for boundary/interface
    /// edges, 2 for conforming interior edges), with traversal orientation.
    std::vector<EdgeOwner> edge_owners(const ConnectivityTables& t, int e) const;

    /// Vertex coordinates of element i at the old (level 0) or new (level 1)
    /// time level.
    std::vector<Vec2> element_polygon(const ConnectivityTables& t, int i,
                                      int level) const;

    Scalar element_area(const ConnectivityTables& t, int i, int level) const;
    Vec2 element_barycenter(const ConnectivityTables& t, int i, int level) const;
    /// CFL length scale of the element (incircle-type diameter) at t^n.
    Scalar element_diameter(const ConnectivityTables& t, int i) const;

    const Vec2& coords(int k, int level) const {
        return level == 0 ? nodes[k].coords_old : nodes[k].coords_new;
    }
    Vec2& coords(int k, int level) {
        return level == 0 ? nodes[k].coords_old : nodes[k].coords_new;
    }

    // -- Validation and I/O ------------------------------------------------------------

    /// Full invariant check of one table buffer; returns human-readable
    /// violations (empty means consistent). Checks cross-consistency of all
    /// six tables, counterclockwise orientation, endpoint/intermediate
    /// structure, hanging-node geometry, and dead-node isolation.
    std::vector<std::string> validate(const ConnectivityTables& t) const;

    /// Plain-text dump: node records, then one section per table.
    void dump(std::ostream& os) const;

private:
    std::set<int> free_nodes_;
    std::set<int> free_edges_;
    std::vector<int> retiring_nodes_;
    std::vector<int> retiring_edges_;

    void ensure_node_rows(int k);
    void ensure_edge_rows(int e);
};

}  // namespace alefv
