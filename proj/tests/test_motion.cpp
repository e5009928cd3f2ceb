/// @file test_motion.cpp
/// @brief Node motion tests: mass-weighted velocity averages, interface node
///        splitting with hanging-node seeding, sliding along host edges,
///        node fusion with conforming-mesh restoration, and multi-step
///        insert/slide/merge cycles with exact volume and closure audits.

#include <algorithm>
#include <cmath>
#include <set>
#include <vector>

#include "alefv/detector.hpp"
#include "alefv/motion.hpp"
#include "alefv/spacetime.hpp"
#include "doctest.h"

using namespace alefv;

namespace {

std::set<int> as_set(const std::vector<int>& v) { return {v.begin(), v.end()}; }

/// Live edge with the given endpoint pair, or -1.
int edge_between(const Mesh& m, const ConnectivityTables& t, int a, int b) {
    for (int e = 0; e < static_cast<int>(t.edge2vertex.size()); ++e) {
        if (!m.edges[e].alive) continue;
        const auto& row = t.edge2vertex[e];
        if (row.size() < 2) continue;
        if ((row[0] == a && row[1] == b) || (row[0] == b && row[1] == a)) return e;
    }
    return -1;
}

std::vector<int> owners_of(const Mesh& m, const ConnectivityTables& t, int e) {
    std::vector<int> out;
    for (const EdgeOwner& o : m.edge_owners(t, e)) out.push_back(o.elem);
    std::sort(out.begin(), out.end());
    return out;
}

Scalar total_area(const Mesh& m, const ConnectivityTables& t, int level) {
    Scalar sum = 0.0;
    for (int i = 0; i < static_cast<int>(m.elems.size()); ++i) {
        if (m.elems[i].alive) sum += m.element_area(t, i, level);
    }
    return sum;
}

void require_valid(const Mesh& m, const ConnectivityTables& t) {
    const auto bad = m.validate(t);
    for (const auto& msg : bad) MESSAGE(msg);
    REQUIRE(bad.empty());
}

/// Antisymmetric vertical shear about x = 0: (0, -2) left, (0, +2) right.
/// Mass is the element area at t^n (unit depth).
NodeMotionField shear_field(const Mesh& m) {
    NodeMotionField f;
    f.velocity.resize(m.elems.size());
    f.mass.resize(m.elems.size(), 0.0);
    for (int i = 0; i < static_cast<int>(m.elems.size()); ++i) {
        if (!m.elems[i].alive) continue;
        const Scalar x = m.element_barycenter(m.cur, i, 0).x;
        f.velocity[i] = {0.0, x < 0.0 ? -2.0 : 2.0};
        f.mass[i] = m.element_area(m.cur, i, 0);
    }
    return f;
}

}  // namespace

// ---- Averaged node velocity -----------------------------------------------------

TEST_CASE("motion: node velocity is the mass-weighted element average") {
    NodeMotionField f;
    f.velocity = {{0.0, 2.0}, {0.0, -2.0}, {1.0, 0.0}};
    f.mass = {3.0, 1.0, 0.0};

    const Vec2 v = cheng_shu_velocity(f, {0, 1});
    CHECK(v.x == 0.0);
    CHECK(v.y == doctest::Approx(1.0).epsilon(1e-15));
    MESSAGE("mass-weighted average of (0,2)x3 and (0,-2)x1: vy = ", v.y);

    // Equal masses give the arithmetic mean.
    f.mass = {2.0, 2.0, 0.0};
    const Vec2 w = cheng_shu_velocity(f, {0, 1});
    CHECK(w.y == 0.0);

    // A stencil without positive mass has no defined average.
    CHECK_THROWS_AS(cheng_shu_velocity(f, {2}), PositivityError);
    CHECK_THROWS_AS(cheng_shu_velocity(f, {}), PositivityError);
}

// ---- Direct node split ------------------------------------------------------------

TEST_CASE("motion: splitting an interface node doubles edges and seeds hanging nodes") {
    // 2x2 quads on [-1,1]^2; node 4 is the center, the interface is x = 0.
    Mesh m = Mesh::generate_rect({-1.0, -1.0}, {1.0, 1.0}, 2, 2, MeshKind::Quads);
    const Scalar d = 0.1;
    const int knew = split_node(m, 4, {0, 2}, {1, 3}, {0.0, -d}, {0.0, d}, {0.0, 1.0});
    CHECK(knew == 9);

    // The copy takes the right-side elements.
    CHECK(m.cur.tri[1] == std::vector<int>{1, 2, 5, 9});
    CHECK(m.cur.tri[3] == std::vector<int>{9, 5, 8, 7});
    CHECK(as_set(m.cur.vertex2elem[4]) == std::set<int>{0, 2});
    CHECK(as_set(m.cur.vertex2elem[9]) == std::set<int>{1, 3});

    // Both conforming interface edges were duplicated into one-sided copies.
    const int e_dn = edge_between(m, m.cur, 1, 4);
    const int e_up = edge_between(m, m.cur, 4, 7);
    const int f_dn = edge_between(m, m.cur, 1, 9);
    const int f_up = edge_between(m, m.cur, 9, 7);
    REQUIRE(e_dn >= 0);
    REQUIRE(e_up >= 0);
    REQUIRE(f_dn >= 0);
    REQUIRE(f_up >= 0);
    CHECK(owners_of(m, m.cur, e_dn) == std::vector<int>{0});
    CHECK(owners_of(m, m.cur, e_up) == std::vector<int>{2});
    CHECK(owners_of(m, m.cur, f_dn) == std::vector<int>{1});
    CHECK(owners_of(m, m.cur, f_up) == std::vector<int>{3});

    // Each moved node hangs inside the opposite side's span: the original
    // node (moved down) inside the right copy reaching down to the boundary,
    // the copy (moved up) inside the left edge reaching up.
    CHECK(m.cur.edge2vertex[f_dn] == std::vector<int>{1, 9, 4});
    CHECK(m.cur.edge2vertex[e_up] == std::vector<int>{4, 7, 9});
    CHECK(m.nodes[4].label == NodeLabel::Hanging);
    CHECK(m.nodes[4].host_edge == f_dn);
    CHECK(m.nodes[9].label == NodeLabel::Hanging);
    CHECK(m.nodes[9].host_edge == e_up);

    // The hosts gained the newcomers' own-side elements as overlap partners,
    // owners first.
    CHECK(m.cur.edge2elem[f_dn] == std::vector<int>{1, 0, 2});
    CHECK(m.cur.edge2elem[e_up] == std::vector<int>{2, 3, 1});

    // Positions: on-line projections of the per-side displacements.
    CHECK(m.nodes[4].coords_new.x == 0.0);
    CHECK(m.nodes[4].coords_new.y == -d);
    CHECK(m.nodes[9].coords_old.x == 0.0);
    CHECK(m.nodes[9].coords_old.y == 0.0);
    CHECK(m.nodes[9].coords_new.y == d);

    // Both buffers were edited identically and stay consistent.
    CHECK(m.cur.tri == m.next.tri);
    CHECK(m.cur.edge2vertex == m.next.edge2vertex);
    CHECK(m.cur.edge2elem == m.next.edge2elem);
    require_valid(m, m.cur);
    require_valid(m, m.next);

    // Tangential doubling moves volume along the interface only.
    CHECK(total_area(m, m.cur, 0) == doctest::Approx(4.0).epsilon(1e-14));
    CHECK(total_area(m, m.cur, 1) == doctest::Approx(4.0).epsilon(1e-14));
    MESSAGE("area after split: t0 = ", total_area(m, m.cur, 0),
            ", t1 = ", total_area(m, m.cur, 1));

    // Space-time closure through the fresh nonconforming junction.
    const auto faces = build_faces(m, 0.05);
    const auto audit = closure_audit(m, m.cur, faces);
    CHECK(audit.max_rel <= 1e-12);
    MESSAGE("closure after split: max_rel = ", audit.max_rel);
}

TEST_CASE("motion: same-direction shear seeds the trailing edge") {
    // Left side at rest, right side sliding up: the resting node must hang
    // inside the right copy that trails below the risen right node.
    Mesh m = Mesh::generate_rect({-1.0, -1.0}, {1.0, 1.0}, 2, 2, MeshKind::Quads);
    const Scalar d = 0.05;
    const int knew = split_node(m, 4, {0, 2}, {1, 3}, {0.0, 0.0}, {0.0, d}, {0.0, 1.0});
    CHECK(knew == 9);

    const int f_dn = edge_between(m, m.cur, 1, 9);
    const int e_up = edge_between(m, m.cur, 4, 7);
    REQUIRE(f_dn >= 0);
    REQUIRE(e_up >= 0);
    CHECK(m.nodes[4].label == NodeLabel::Hanging);
    CHECK(m.nodes[4].host_edge == f_dn);
    CHECK(m.nodes[9].label == NodeLabel::Hanging);
    CHECK(m.nodes[9].host_edge == e_up);
    require_valid(m, m.cur);
}

// ---- Zero shear: split then fuse restores the conforming mesh ---------------------

TEST_CASE("motion: zero-shear split and fusion restore the conforming mesh") {
    Mesh m = Mesh::generate_rect({-1.0, -1.0}, {1.0, 1.0}, 2, 2, MeshKind::Quads);
    const Vec2 delta{0.0, 0.05};
    const int knew = split_node(m, 4, {0, 2}, {1, 3}, delta, delta, {0.0, 1.0});
    CHECK(knew == 9);

    // Equal displacements leave both copies coincident and unseeded.
    CHECK(m.nodes[4].label == NodeLabel::Regular);
    CHECK(m.nodes[9].label == NodeLabel::Regular);
    CHECK(m.nodes[4].coords_new.y == m.nodes[9].coords_new.y);
    require_valid(m, m.cur);

    MotionReport rep;
    merge_nodes(m, 4, 9, &rep);
    CHECK(rep.merges == 1);
    CHECK(rep.collapsed_edges == 2);

    // The old buffer still holds the split state for this step's assembly.
    require_valid(m, m.cur);
    m.commit();
    refresh_labels(m);
    require_valid(m, m.cur);
    require_valid(m, m.next);

    CHECK(m.num_live_nodes() == 9);
    CHECK(m.num_live_edges() == 12);
    CHECK_FALSE(m.nodes[9].alive);
    CHECK(m.nodes[9].label == NodeLabel::Dead);
    CHECK(m.cur.tri[1] == std::vector<int>{1, 2, 5, 4});
    CHECK(m.cur.tri[3] == std::vector<int>{4, 5, 8, 7});
    for (int k = 0; k < 9; ++k) CHECK(m.nodes[k].label == NodeLabel::Regular);

    // Every interior edge is conforming (two owners) again.
    const int e_dn = edge_between(m, m.cur, 1, 4);
    const int e_up = edge_between(m, m.cur, 4, 7);
    CHECK(owners_of(m, m.cur, e_dn) == std::vector<int>{0, 1});
    CHECK(owners_of(m, m.cur, e_up) == std::vector<int>{2, 3});

    // Identical areas to a mesh whose center node moved the same way
    // without ever splitting.
    Mesh ref = Mesh::generate_rect({-1.0, -1.0}, {1.0, 1.0}, 2, 2, MeshKind::Quads);
    ref.nodes[4].coords_new = ref.nodes[4].coords_old + delta;
    ref.commit();
    Scalar max_diff = 0.0;
    for (int i = 0; i < 4; ++i) {
        max_diff = std::max(max_diff, std::abs(m.element_area(m.cur, i, 0) -
                                               ref.element_area(ref.cur, i, 0)));
    }
    CHECK(max_diff <= 1e-13);
    MESSAGE("max element area mismatch after restore: ", max_diff);
}

// ---- Hanging-node slide --------------------------------------------------------------

TEST_CASE("motion: sliding keeps a hanging node on its host line") {
    Mesh m = Mesh::generate_rect({-1.0, -1.0}, {1.0, 1.0}, 2, 2, MeshKind::Quads);
    split_node(m, 4, {0, 2}, {1, 3}, {0.0, -0.1}, {0.0, 0.1}, {0.0, 1.0});
    const int f_dn = m.nodes[4].host_edge;  // [1, 9], spans y in [-1, 0.1]
    REQUIRE(f_dn >= 0);

    // On-line target applies exactly.
    SlideOutcome out = slide_hanging_node(m, 4, {0.0, -0.3});
    CHECK(out.applied.x == 0.0);
    CHECK(out.applied.y == -0.3);
    CHECK_FALSE(out.merge);

    // Off-line targets project back onto the host.
    out = slide_hanging_node(m, 4, {0.4, -0.25});
    CHECK(out.applied.x == 0.0);
    CHECK(out.applied.y == doctest::Approx(-0.25).epsilon(1e-15));
    CHECK(m.nodes[4].coords_new.x == 0.0);
    CHECK_FALSE(out.merge);
    MESSAGE("off-line slide projected to y = ", out.applied.y);

    // Leaving the host span requests fusion with the closest endpoint.
    out = slide_hanging_node(m, 4, {0.0, 0.5});
    CHECK(out.merge);
    CHECK(out.merge_with == 9);
    out = slide_hanging_node(m, 4, {0.0, -1.7});
    CHECK(out.merge);
    CHECK(out.merge_with == 1);

    // Only live hanging nodes with live hosts can slide.
    CHECK_THROWS_AS(slide_hanging_node(m, 0, {0.0, 0.0}), TopologyError);
    m.retire_edge(f_dn);
    CHECK_THROWS_AS(slide_hanging_node(m, 4, {0.0, -0.2}), TopologyError);
}

// ---- Detector-driven advance ------------------------------------------------------

TEST_CASE("motion: advance doubles the whole interface column in one step") {
    Mesh m = Mesh::generate_rect({-1.0, -1.0}, {1.0, 1.0}, 2, 2, MeshKind::Quads);
    const NodeMotionField f = shear_field(m);
    const InterfaceMarking mk = detect(m, m.cur, f.velocity, 1.0);
    CHECK(mk.nodes_to_double == std::vector<int>{1, 4, 7});

    const Scalar dt = 0.01;
    const MotionReport rep = advance_nodes(m, mk, f, dt, MotionBounds{});
    CHECK(rep.splits == 3);
    CHECK(rep.moved == 6);
    CHECK(rep.slides == 0);
    CHECK(rep.merges == 0);
    MESSAGE("advance: ", rep.splits, " splits, ", rep.moved, " plain moves");

    // Left column fell by 2 dt, right copies rose by 2 dt; outer nodes
    // translated with their side.
    CHECK(m.nodes[1].coords_new.y == -1.0 - 2.0 * dt);
    CHECK(m.nodes[9].coords_new.y == -1.0 + 2.0 * dt);
    CHECK(m.nodes[4].coords_new.y == -2.0 * dt);
    CHECK(m.nodes[10].coords_new.y == 2.0 * dt);
    CHECK(m.nodes[7].coords_new.y == 1.0 - 2.0 * dt);
    CHECK(m.nodes[11].coords_new.y == 1.0 + 2.0 * dt);
    CHECK(m.nodes[0].coords_new.y == -1.0 - 2.0 * dt);
    CHECK(m.nodes[8].coords_new.y == 1.0 + 2.0 * dt);
    for (const int k : {1, 4, 7, 9, 10, 11}) CHECK(m.nodes[k].coords_new.x == 0.0);

    // Chain structure: each interior node hangs inside the opposite column.
    const int e1 = edge_between(m, m.cur, 1, 4);
    const int e7 = edge_between(m, m.cur, 4, 7);
    const int f_a = edge_between(m, m.cur, 9, 10);
    const int f_b = edge_between(m, m.cur, 10, 11);
    REQUIRE(e1 >= 0);
    REQUIRE(e7 >= 0);
    REQUIRE(f_a >= 0);
    REQUIRE(f_b >= 0);
    CHECK(m.cur.edge2vertex[e1] == std::vector<int>{1, 4, 9});
    CHECK(m.cur.edge2vertex[e7] == std::vector<int>{4, 7, 10});
    CHECK(m.cur.edge2vertex[f_a] == std::vector<int>{9, 10, 4});
    CHECK(m.cur.edge2vertex[f_b] == std::vector<int>{10, 11, 7});
    CHECK(m.cur.edge2elem[e1] == std::vector<int>{0, 1});
    CHECK(m.cur.edge2elem[e7] == std::vector<int>{2, 3, 1});
    CHECK(m.cur.edge2elem[f_a] == std::vector<int>{1, 0, 2});
    CHECK(m.cur.edge2elem[f_b] == std::vector<int>{3, 2});
    CHECK(m.cur.tri[1] == std::vector<int>{9, 2, 5, 10});
    CHECK(m.cur.tri[3] == std::vector<int>{10, 5, 8, 11});

    CHECK(m.nodes[9].host_edge == e1);
    CHECK(m.nodes[4].host_edge == f_a);
    CHECK(m.nodes[10].host_edge == e7);
    CHECK(m.nodes[7].host_edge == f_b);
    CHECK(m.nodes[1].label == NodeLabel::Regular);
    CHECK(m.nodes[11].label == NodeLabel::Regular);

    require_valid(m, m.cur);
    require_valid(m, m.next);
    CHECK(total_area(m, m.cur, 1) == doctest::Approx(4.0).epsilon(1e-14));

    const auto faces = build_faces(m, dt);
    const auto audit = closure_audit(m, m.cur, faces);
    CHECK(audit.max_rel <= 1e-12);
    MESSAGE("closure after sheared advance: max_rel = ", audit.max_rel);

    m.commit();
    refresh_labels(m);
    require_valid(m, m.cur);
    CHECK(m.nodes[4].label == NodeLabel::Hanging);
    CHECK(m.nodes[1].label == NodeLabel::Regular);
}

TEST_CASE("motion: eulerian advance resets positions and touches nothing") {
    Mesh m = Mesh::generate_rect({-1.0, -1.0}, {1.0, 1.0}, 2, 2, MeshKind::Quads);
    const NodeMotionField f = shear_field(m);
    const InterfaceMarking mk = detect(m, m.cur, f.velocity, 1.0);
    REQUIRE_FALSE(mk.empty());

    const std::size_t edges_before = m.edges.size();
    const MotionReport rep = advance_nodes(m, mk, f, 0.01, MotionBounds{}, true);
    CHECK(rep.splits == 0);
    CHECK(rep.moved == 0);
    CHECK(rep.merges == 0);
    CHECK(m.edges.size() == edges_before);
    for (const auto& n : m.nodes) {
        if (!n.alive) continue;
        CHECK(n.coords_new.x == n.coords_old.x);
        CHECK(n.coords_new.y == n.coords_old.y);
    }
    require_valid(m, m.cur);
}

TEST_CASE("motion: walls pin the normal coordinate of boundary nodes") {
    Mesh m = Mesh::generate_rect({-1.0, -1.0}, {1.0, 1.0}, 2, 2, MeshKind::Quads);
    NodeMotionField f;
    f.velocity.assign(m.elems.size(), Vec2{3.0, 1.0});
    f.mass.assign(m.elems.size(), 1.0);

    MotionBounds bounds;
    bounds.wall_x_min = bounds.wall_x_max = true;
    const Scalar dt = 0.02;
    advance_nodes(m, InterfaceMarking{}, f, dt, bounds);

    for (int k = 0; k < static_cast<int>(m.nodes.size()); ++k) {
        const NodeRecord& n = m.nodes[k];
        if (!n.alive) continue;
        if (n.sides & (kSideXMin | kSideXMax)) {
            CHECK(n.coords_new.x == n.coords_old.x);  // wall: no normal motion
        } else {
            CHECK(n.coords_new.x == doctest::Approx(n.coords_old.x + 3.0 * dt));
        }
        CHECK(n.coords_new.y == doctest::Approx(n.coords_old.y + dt));
    }
    require_valid(m, m.cur);
}

TEST_CASE("motion: invalid inputs are rejected") {
    Mesh m = Mesh::generate_rect({-1.0, -1.0}, {1.0, 1.0}, 2, 2, MeshKind::Quads);
    NodeMotionField f;
    f.velocity.assign(m.elems.size(), Vec2{});
    f.mass.assign(m.elems.size(), 1.0);

    CHECK_THROWS_AS(advance_nodes(m, InterfaceMarking{}, f, 0.0, MotionBounds{}),
                    ConfigError);
    NodeMotionField short_field;
    short_field.velocity.assign(1, Vec2{});
    short_field.mass.assign(1, 1.0);
    CHECK_THROWS_AS(advance_nodes(m, InterfaceMarking{}, short_field, 0.01, MotionBounds{}),
                    ConfigError);

    // A conforming edge joining the two sides off the split line is not a
    // straight sliding interface.
    CHECK_THROWS_AS(
        split_node(m, 4, {0, 2}, {1, 3}, {0.0, 0.0}, {0.0, 0.0}, {1.0, 1.0}),
        GeometryError);
    // Every incident element must be assigned to a side.
    CHECK_THROWS_AS(
        split_node(m, 4, {0, 2}, {1}, {0.0, 0.0}, {0.0, 0.0}, {0.0, 1.0}),
        TopologyError);

    // Fusing edge-joined nodes would collapse an element boundary.
    CHECK_THROWS_AS(merge_nodes(m, 4, 5), TopologyError);
    CHECK_THROWS_AS(merge_nodes(m, 4, 4), TopologyError);

    // Hanging nodes cannot be split again; regular nodes cannot slide.
    CHECK_THROWS_AS(slide_hanging_node(m, 4, {0.0, 0.0}), TopologyError);
    split_node(m, 4, {0, 2}, {1, 3}, {0.0, -0.1}, {0.0, 0.1}, {0.0, 1.0});
    CHECK_THROWS_AS(
        split_node(m, 4, {0, 2}, {1, 3}, {0.0, -0.1}, {0.0, 0.1}, {0.0, 1.0}),
        TopologyError);
}

// ---- Multi-step cycle: slide, fuse, re-split ---------------------------------------

TEST_CASE("motion: sliding interface heals and re-splits across many steps") {
    Mesh m = Mesh::generate_rect({-1.0, -1.0}, {1.0, 1.0}, 2, 2, MeshKind::Quads);
    const Scalar dt = 0.06;
    int total_splits = 0, total_merges = 0, total_slides = 0;

    for (int step = 0; step < 12; ++step) {
        const NodeMotionField f = shear_field(m);
        const InterfaceMarking mk = detect(m, m.cur, f.velocity, 1.0);
        const MotionReport rep = advance_nodes(m, mk, f, dt, MotionBounds{});
        total_splits += rep.splits;
        total_merges += rep.merges;
        total_slides += rep.slides;

        require_valid(m, m.cur);
        for (int i = 0; i < static_cast<int>(m.elems.size()); ++i) {
            if (!m.elems[i].alive) continue;
            CHECK(m.element_area(m.cur, i, 1) > 0.0);
        }
        // The interface stays the exact line x = 0 at all times.
        for (const auto& n : m.nodes) {
            if (n.alive && std::abs(n.coords_old.x) < 1.0) CHECK(n.coords_new.x == 0.0);
        }
        CHECK(total_area(m, m.cur, 1) == doctest::Approx(4.0).epsilon(1e-12));

        const auto faces = build_faces(m, dt);
        const auto audit = closure_audit(m, m.cur, faces);
        CHECK(audit.max_rel <= 1e-12);

        m.commit();
        refresh_labels(m);
        require_valid(m, m.cur);
        require_valid(m, m.next);
    }

    // The column splits at step 1, nodes fuse as columns pass each other,
    // and fused nodes re-split the following step.
    CHECK(total_splits >= 5);
    CHECK(total_merges >= 2);
    CHECK(total_slides >= 10);
    MESSAGE("cycle totals: splits = ", total_splits, ", merges = ", total_merges,
            ", slides = ", total_slides);
}

// ---- Periodic tandem --------------------------------------------------------------

TEST_CASE("motion: periodic partners split and fuse in exact tandem") {
    Mesh m = Mesh::generate_rect({-1.0, 0.0}, {1.0, 2.0}, 2, 2, MeshKind::Quads);
    m.make_periodic_y();
    REQUIRE(m.nodes[1].pair_up == 7);

    const Scalar dt = 0.05;
    {
        const NodeMotionField f = shear_field(m);
        const InterfaceMarking mk = detect(m, m.cur, f.velocity, 1.0);
        REQUIRE(as_set(mk.nodes_to_double) == std::set<int>{1, 4, 7});
        const MotionReport rep = advance_nodes(m, mk, f, dt, MotionBounds{});
        CHECK(rep.splits == 3);
    }

    // Seam pairs stay exactly one period apart, including the fresh copies.
    const int c1 = 9;   // right copy of node 1 (split jointly with 7 -> 10)
    const int c7 = 10;
    CHECK(m.nodes[9].pair_up == 10);
    CHECK(m.nodes[7].coords_new.y == m.nodes[1].coords_new.y + 2.0);
    CHECK(m.nodes[c7].coords_new.y == m.nodes[c1].coords_new.y + 2.0);
    CHECK(m.nodes[7].coords_new.x == m.nodes[1].coords_new.x);

    require_valid(m, m.cur);
    CHECK(total_area(m, m.cur, 1) == doctest::Approx(4.0).epsilon(1e-13));
    {
        const auto faces = build_faces(m, dt);
        const auto audit = closure_audit(m, m.cur, faces);
        CHECK(audit.max_rel <= 1e-12);
        MESSAGE("closure with wrapped interface: max_rel = ", audit.max_rel);
    }
    m.commit();
    refresh_labels(m);

    // Long run across many fuse/re-split generations: the seam invariant
    // must hold bitwise after every step.
    int total_merges = 0, total_splits = 0;
    for (int step = 0; step < 14; ++step) {
        const NodeMotionField f = shear_field(m);
        const InterfaceMarking mk = detect(m, m.cur, f.velocity, 1.0);
        const MotionReport rep = advance_nodes(m, mk, f, dt, MotionBounds{});
        total_merges += rep.merges;
        total_splits += rep.splits;

        require_valid(m, m.cur);
        CHECK(total_area(m, m.cur, 1) == doctest::Approx(4.0).epsilon(1e-12));
        const auto faces = build_faces(m, dt);
        const auto audit = closure_audit(m, m.cur, faces);
        CHECK(audit.max_rel <= 1e-12);

        m.commit();
        refresh_labels(m);
        refresh_overlap_adjacency(m, m.cur, 0);
        refresh_overlap_adjacency(m, m.next, 0);
        require_valid(m, m.cur);

        for (int k = 0; k < static_cast<int>(m.nodes.size()); ++k) {
            const NodeRecord& n = m.nodes[k];
            if (!n.alive || n.pair_up < 0) continue;
            const NodeRecord& p = m.nodes[n.pair_up];
            CHECK(p.coords_old.x == n.coords_old.x);
            CHECK(p.coords_old.y == n.coords_old.y + 2.0);
        }
    }
    CHECK(total_splits >= 3);
    CHECK(total_merges >= 2);
    MESSAGE("periodic cycle: splits = ", total_splits, ", merges = ", total_merges);
}
