/// @file motion.hpp
/// @brief Node motion for the sliding-interface mesh: mass-weighted velocity
///        averages, splitting of interface nodes into per-side copies,
///        hanging-node sliding along host edges, fusion of colliding nodes,
///        and the per-step sequencer that runs them under boundary
///        constraints.
///
/// A step moves every node by the mass-weighted average of the velocities of
/// its adjacent elements. Where a sliding interface has been detected the
/// straddling nodes are doubled: each copy follows the one-sided average of
/// its own side, projected onto the interface line, and the copies become
/// intermediate (hanging) nodes of the opposite side's edges. Hanging nodes
/// slide along their host edge; when one leaves the host segment, or two
/// nodes on one edge approach each other, they are fused back into a single
/// node. Splits edit both table buffers so the current step can still be
/// assembled from the old tables; fusions edit only the next buffer and take
/// effect at Mesh::commit().
#pragma once

#include <vector>

#include "alefv/core.hpp"
#include "alefv/detector.hpp"
#include "alefv/mesh.hpp"

namespace alefv {

// ---- Inputs --------------------------------------------------------------------

/// Per-element data driving node motion: the chart velocity each element
/// contributes and its mass h * |T|, which is the averaging weight. Both
/// vectors are indexed by element id; entries of dead elements are ignored.
struct NodeMotionField {
    std::vector<Vec2> velocity;
    std::vector<Scalar> mass;
};

/// Which domain sides are impenetrable walls. Nodes on a wall keep their
/// normal coordinate fixed and may still slide tangentially; nodes on other
/// sides move freely (the boundary deforms with them).
struct MotionBounds {
    bool wall_x_min = false;
    bool wall_x_max = false;
    bool wall_y_min = false;
    bool wall_y_max = false;
};

/// Counters for one advance_nodes call.
struct MotionReport {
    int moved = 0;            ///< nodes given a plain averaged displacement
    int splits = 0;           ///< interface nodes doubled
    int slides = 0;           ///< hanging nodes slid along their host
    int merges = 0;           ///< node fusions executed
    int collapsed_edges = 0;  ///< duplicate edges removed by fusions
};

/// Outcome of sliding one hanging node.
struct SlideOutcome {
    Vec2 applied;         ///< projected position written to coords_new
    bool merge = false;   ///< the projection left the host segment
    int merge_with = -1;  ///< closest host endpoint when merge is set
};

// ---- Node velocity -------------------------------------------------------------

/// Mass-weighted average velocity over a stencil of elements:
/// V = sum(m_i v_i) / sum(m_i). Throws PositivityError when the stencil
/// carries no positive mass (the average would be undefined).
Vec2 cheng_shu_velocity(const NodeMotionField& field, const std::vector<int>& stencil);

// ---- Topology edits --------------------------------------------------------------

/// Double node k along the interface line through its old position with unit
/// direction `line_dir`. The original node keeps the left-side elements and
/// moves by the on-line projection of `left_delta`; the returned new node
/// (smallest free id) takes the right-side elements, starts at k's old
/// position, and moves by the projection of `right_delta`. Conforming edges
/// on the line are duplicated so each side owns its own copy; a copy whose
/// opposite-side span strictly contains the other side's moved node gains it
/// as an intermediate (hanging) node and gains that node's own-side edge
/// owners as overlap neighbors. Both table buffers are edited identically.
///
/// Throws TopologyError when k is dead, hangs on an edge, or lacks elements
/// on either side, and GeometryError when a conforming incident edge with
/// owners on both sides does not lie on the interface line (relative
/// tolerance 1e-10): such a junction is not a straight sliding interface.
int split_node(Mesh& m, int k, const std::vector<int>& left_elems,
               const std::vector<int>& right_elems, const Vec2& left_delta,
               const Vec2& right_delta, const Vec2& line_dir);

/// Slide hanging node k toward `raw_target`: the target is projected
/// orthogonally onto the line of the host edge's new-time segment and
/// written to coords_new. When the projection falls outside the host segment
/// the outcome requests a fusion with the closest host endpoint. Throws
/// TopologyError when k is not hanging or its host edge is dead.
SlideOutcome slide_hanging_node(Mesh& m, int k, const Vec2& raw_target);

/// Fuse two nodes: the smaller id survives, both take the midpoint of their
/// new-time positions (so the old tables keep describing the same geometry),
/// and only the next-step tables are rewired: the dead node's elements and
/// edges are transferred to the survivor, edges that carried the collapsed
/// segment drop it together with the overlap neighbors across it, and edges
/// left with identical endpoints are collapsed (the larger id dies). The
/// dead node's id is recycled after Mesh::commit(). Throws TopologyError for
/// dead nodes or nodes joined by an edge (fusing them would collapse an
/// element boundary).
void merge_nodes(Mesh& m, int a, int b, MotionReport* report = nullptr);

/// Relabel every live node from the current tables: a node listed beyond the
/// endpoints of a live edge is Hanging with that edge as host, every other
/// node is Regular. Call right after Mesh::commit() so labels describe the
/// tables the next step will see. Throws TopologyError when a node is an
/// intermediate of two edges.
void refresh_labels(Mesh& m);

// ---- Step sequencer ----------------------------------------------------------------

/// Move every node over a step of size dt:
///   1. regular unmarked nodes get the averaged displacement (walls pin the
///      normal component); nodes queued by the detector are split;
///   2. hanging nodes slide along their hosts;
///   3. nodes that left their host segment, or approach another node on the
///      same edge to within 0.2x the shortest adjacent interface edge while
///      closing in, are fused (receding pairs such as fresh copies are
///      never re-fused);
///   4. periodic partners use combined stencils and move in exact tandem,
///      split in tandem, and fuse in tandem one period apart.
/// Passes run in ascending node id, so the fusion survivor is always the
/// smallest id. With `eulerian` set, coords_new is reset to coords_old and
/// nothing else happens. The caller commits the mesh afterwards and then
/// calls refresh_labels().
MotionReport advance_nodes(Mesh& m, const InterfaceMarking& marking,
                           const NodeMotionField& field, Scalar dt,
                           const MotionBounds& bounds, bool eulerian = false);

}  // namespace alefv
