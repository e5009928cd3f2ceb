/// @file test_mesh.cpp
/// @brief Mesh generation, table consistency, index recycling, and dump tests.

#include <cmath>
#include <sstream>

#include "alefv/geometry.hpp"
#include "alefv/mesh.hpp"
#include "doctest.h"
#include "oracles/geometry_oracles.hpp"

using namespace alefv;

namespace {

Scalar total_area(const Mesh& m, int level) {
    Scalar a = 0.0;
    for (int i = 0; i < static_cast<int>(m.cur.tri.size()); ++i) {
        if (m.elems[i].alive) a += m.element_area(m.cur, i, level);
    }
    return a;
}

}  // namespace

TEST_CASE("generate quads: counts and area partition") {
    const Mesh m = Mesh::generate_rect({0, 0}, {1, 1}, 2, 2, MeshKind::Quads);
    CHECK(m.num_live_elems() == 4);
    CHECK(m.num_live_nodes() == 9);
    CHECK(m.num_live_edges() == 12);
    CHECK(total_area(m, 0) == doctest::Approx(1.0).epsilon(1e-13));
    CHECK(m.validate(m.cur).empty());
    CHECK(m.validate(m.next).empty());
}

TEST_CASE("generate triangles and mixed: counts") {
    const Mesh tri = Mesh::generate_rect({0, 0}, {1, 1}, 2, 2, MeshKind::Triangles);
    CHECK(tri.num_live_elems() == 8);
    CHECK(tri.validate(tri.cur).empty());

    const Mesh mix = Mesh::generate_rect({0, 0}, {1, 1}, 2, 2, MeshKind::Mixed);
    CHECK(mix.num_live_elems() == 6);  // two quads + two split cells
    CHECK(mix.validate(mix.cur).empty());

    const Mesh cc = Mesh::generate_rect({0, 0}, {1, 1}, 2, 2, MeshKind::CrissCross);
    CHECK(cc.num_live_elems() == 16);
    CHECK(cc.num_live_nodes() == 13);
    CHECK(cc.validate(cc.cur).empty());
}

TEST_CASE("generate: area partition equals domain area") {
    for (const MeshKind kind : {MeshKind::Quads, MeshKind::Triangles, MeshKind::Mixed,
                                MeshKind::CrissCross}) {
        const Mesh m = Mesh::generate_rect({-2, 0}, {2, 4}, 12, 12, kind);
        CHECK(total_area(m, 0) == doctest::Approx(16.0).epsilon(1e-12));
        CHECK(total_area(m, 1) == doctest::Approx(16.0).epsilon(1e-12));
        CHECK(m.validate(m.cur).empty());
    }
}

TEST_CASE("generate: invalid arguments") {
    CHECK_THROWS_AS(Mesh::generate_rect({0, 0}, {1, 1}, 0, 2, MeshKind::Quads),
                    ConfigError);
    CHECK_THROWS_AS(Mesh::generate_rect({0, 0}, {0, 1}, 2, 2, MeshKind::Quads),
                    ConfigError);
}

TEST_CASE("element queries: polygon, barycenter, diameter") {
    const Mesh m = Mesh::generate_rect({0, 0}, {2, 1}, 2, 1, MeshKind::Quads);
    // Each cell is a unit square.
    CHECK(m.element_area(m.cur, 0, 0) == doctest::Approx(1.0).epsilon(1e-14));
    const Vec2 c = m.element_barycenter(m.cur, 0, 0);
    CHECK(c.x == doctest::Approx(0.5).epsilon(1e-13));
    CHECK(c.y == doctest::Approx(0.5).epsilon(1e-13));
    CHECK(m.element_diameter(m.cur, 0) == doctest::Approx(1.0).epsilon(1e-13));

    // Barycenter agrees with the fan-triangulation oracle on every element.
    for (int i = 0; i < m.num_live_elems(); ++i) {
        const auto poly = m.element_polygon(m.cur, i, 0);
        const Vec2 got = m.element_barycenter(m.cur, i, 0);
        const Vec2 want = test::fan_centroid(poly);
        CHECK(got.x == doctest::Approx(want.x).epsilon(1e-13));
        CHECK(got.y == doctest::Approx(want.y).epsilon(1e-13));
    }
}

TEST_CASE("mean CFL length of structured meshes") {
    // Anchors the mesh-size convention used in the convergence studies.
    {
        const Mesh m = Mesh::generate_rect({-2, 0}, {2, 4}, 12, 12, MeshKind::Triangles);
        Scalar mean = 0.0;
        for (int i = 0; i < m.num_live_elems(); ++i) mean += m.element_diameter(m.cur, i);
        mean /= m.num_live_elems();
        CHECK(mean == doctest::Approx(0.195).epsilon(3e-3));
    }
    {
        const Mesh m =
            Mesh::generate_rect({0.2, 0.0}, {2.0, 2.0 * M_PI}, 12, 12, MeshKind::Quads);
        Scalar mean = 0.0;
        for (int i = 0; i < m.num_live_elems(); ++i) mean += m.element_diameter(m.cur, i);
        mean /= m.num_live_elems();
        CHECK(mean == doctest::Approx(0.233).epsilon(3e-3));
    }
}

TEST_CASE("edge owners and orientation") {
    const Mesh m = Mesh::generate_rect({0, 0}, {1, 1}, 2, 2, MeshKind::Quads);
    int n_interior = 0, n_boundary = 0;
    for (int e = 0; e < static_cast<int>(m.edges.size()); ++e) {
        const auto owners = m.edge_owners(m.cur, e);
        if (owners.size() == 2) {
            ++n_interior;
            CHECK(owners[0].forward != owners[1].forward);  // opposite traversal
            CHECK(m.edges[e].boundary == kEdgeInterior);
        } else {
            REQUIRE(owners.size() == 1);
            ++n_boundary;
            CHECK(m.edges[e].boundary != kEdgeInterior);
        }
    }
    CHECK(n_interior == 4);
    CHECK(n_boundary == 8);
}

TEST_CASE("index allocation reuses smallest freed ids after commit") {
    Mesh m = Mesh::generate_rect({0, 0}, {1, 1}, 2, 2, MeshKind::Quads);
    const int n0 = static_cast<int>(m.nodes.size());

    // No holes: fresh index appended.
    const int a = m.allocate_node();
    CHECK(a == n0);

    // Retire two ids; they are not reused before commit...
    m.retire_node(3);
    m.retire_node(7);
    m.next.vertex2edge[3].clear();
    m.next.vertex2elem[3].clear();
    m.next.vertex2edge[7].clear();
    m.next.vertex2elem[7].clear();
    // (strip them from next rows so the commit result validates)
    for (auto& row : m.next.tri)
        row.erase(std::remove_if(row.begin(), row.end(),
                                 [](int k) { return k == 3 || k == 7; }),
                  row.end());
    for (auto& row : m.next.edge2vertex)
        row.erase(std::remove_if(row.begin(), row.end(),
                                 [](int k) { return k == 3 || k == 7; }),
                  row.end());
    const int b = m.allocate_node();
    CHECK(b == n0 + 1);

    m.commit();
    CHECK(m.nodes[3].label == NodeLabel::Dead);
    CHECK_FALSE(m.nodes[3].alive);
    // ...and are handed back in ascending order afterwards.
    CHECK(m.allocate_node() == 3);
    CHECK(m.allocate_node() == 7);
    CHECK(m.allocate_node() == n0 + 2);
}

TEST_CASE("validate flags an injected corruption") {
    Mesh m = Mesh::generate_rect({0, 0}, {1, 1}, 2, 2, MeshKind::Quads);
    REQUIRE(m.validate(m.cur).empty());

    Mesh bad = m;
    bad.nodes[0].alive = false;  // element 0 now lists a dead node
    const auto v = bad.validate(bad.cur);
    CHECK_FALSE(v.empty());

    Mesh flipped = m;
    std::reverse(flipped.cur.tri[0].begin(), flipped.cur.tri[0].end());
    const auto v2 = flipped.validate(flipped.cur);
    CHECK_FALSE(v2.empty());  // orientation violation (and edge misalignment)
}

TEST_CASE("periodic pairing of the y boundaries") {
    Mesh m = Mesh::generate_rect({0, 0}, {1, 2}, 3, 3, MeshKind::Quads);
    m.make_periodic_y();
    CHECK(m.period_y == doctest::Approx(2.0));
    int pairs = 0;
    for (int k = 0; k < static_cast<int>(m.nodes.size()); ++k) {
        const auto& n = m.nodes[k];
        if (n.pair_up >= 0) {
            ++pairs;
            const auto& p = m.nodes[n.pair_up];
            CHECK(p.pair_down == k);
            CHECK(p.coords_old.x == n.coords_old.x);
            CHECK(p.coords_old.y == n.coords_old.y + m.period_y);  // exact identification
        }
    }
    CHECK(pairs == 4);
}

TEST_CASE("dump contains node records and all table sections") {
    Mesh m = Mesh::generate_rect({0, 0}, {1, 1}, 1, 1, MeshKind::Quads);
    std::ostringstream os;
    m.dump(os);
    const std::string s = os.str();
    for (const char* tag : {"# nodes", "# tri", "# elem2edge", "# edge2elem",
                            "# edge2vertex", "# vertex2edge", "# vertex2elem"}) {
        CHECK(s.find(tag) != std::string::npos);
    }
    CHECK(s.find("0 0 0 0 0 regular") != std::string::npos);
}
