#include "catch_amalgamated.hpp"

#include <random>

#include "dfc/graph.hpp"
#include "helpers.hpp"

using dfc::Edge;
using dfc::Graph;
using dfc::Matrix;

TEST_CASE("graph construction rejects bad inputs") {
    CHECK_THROWS_AS(Graph(3, {{0, 0}}), std::invalid_argument);       // self loop
    CHECK_THROWS_AS(Graph(3, {{0, 4}}), std::invalid_argument);       // out of range
    CHECK_THROWS_AS(Graph(3, {{0, 1}, {1, 0}}), std::invalid_argument);  // duplicate
    CHECK_THROWS_AS(Graph(0, {}), std::invalid_argument);
}

TEST_CASE("incidence matrix columns") {
    const Graph single(2, {{0, 1}});
    const Matrix b1 = incidence_matrix(single);
    REQUIRE(b1.rows == 2);
    REQUIRE(b1.cols == 1);
    CHECK(b1(0, 0) == 1.0);
    CHECK(b1(1, 0) == -1.0);

    const Graph path(3, {{0, 1}, {1, 2}});
    const Matrix b2 = incidence_matrix(path);
    CHECK(b2(0, 0) == 1.0);
    CHECK(b2(1, 0) == -1.0);
    CHECK(b2(2, 0) == 0.0);
    CHECK(b2(0, 1) == 0.0);
    CHECK(b2(1, 1) == 1.0);
    CHECK(b2(2, 1) == -1.0);

    // each column holds one +1 and one -1, so rows of 1^T B vanish
    std::mt19937 rng(42);
    for (int trial = 0; trial < 20; ++trial) {
        const Graph g = oracle::random_graph(rng, 8, 0.4);
        const Matrix b = incidence_matrix(g);
        for (std::size_t k = 0; k < b.cols; ++k) {
            double colsum = 0.0;
            for (std::size_t i = 0; i < b.rows; ++i) colsum += b(i, k);
            CHECK(colsum == 0.0);
        }
    }
}

TEST_CASE("laplacian matches known matrices") {
    const Graph path(3, {{0, 1}, {1, 2}});
    const Matrix l = laplacian(path);
    const double expected[3][3] = {{1, -1, 0}, {-1, 2, -1}, {0, -1, 1}};
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) CHECK(l(i, j) == expected[i][j]);

    const Graph k3(3, {{0, 1}, {0, 2}, {1, 2}});
    const Matrix lk = laplacian(k3);
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) CHECK(lk(i, j) == (i == j ? 2.0 : -1.0));

    const Graph edgeless(4, {});
    const Matrix lz = laplacian(edgeless);
    for (double v : lz.data) CHECK(v == 0.0);

    const Matrix bz = incidence_matrix(edgeless);  // a 4x0 matrix
    CHECK(bz.rows == 4);
    CHECK(bz.cols == 0);
    CHECK(bz.data.empty());
}

TEST_CASE("laplacian equals incidence times its transpose, exactly") {
    std::mt19937 rng(7);
    for (int trial = 0; trial < 30; ++trial) {
        const Graph g = oracle::random_graph(rng, 10, 0.3);
        const Matrix l = laplacian(g);
        const auto bbT = oracle::times_own_transpose(incidence_matrix(g));
        for (std::size_t i = 0; i < l.rows; ++i)
            for (std::size_t j = 0; j < l.cols; ++j) CHECK(l(i, j) == bbT[i][j]);
    }
}

TEST_CASE("spectral summary on known graphs") {
    const Graph k2(2, {{0, 1}});
    const dfc::SpectralSummary s2 = spectral_summary(k2);
    REQUIRE(s2.laplacian_eigenvalues.size() == 2);
    CHECK_THAT(s2.laplacian_eigenvalues[0], Catch::Matchers::WithinAbs(0.0, 1e-10));
    CHECK_THAT(s2.laplacian_eigenvalues[1], Catch::Matchers::WithinAbs(2.0, 1e-10));
    CHECK_THAT(s2.algebraic_connectivity, Catch::Matchers::WithinAbs(2.0, 1e-10));

    const Graph disjoint(4, {{0, 1}, {2, 3}});
    CHECK_THAT(spectral_summary(disjoint).algebraic_connectivity,
               Catch::Matchers::WithinAbs(0.0, 1e-10));

    const std::size_t n = 6;  // complete graph spectrum is {0, n, ..., n}
    std::vector<Edge> edges;
    for (std::uint32_t i = 0; i < n; ++i)
        for (std::uint32_t j = i + 1; j < n; ++j) edges.push_back({i, j});
    const dfc::SpectralSummary sk = spectral_summary(Graph(n, edges));
    CHECK_THAT(sk.algebraic_connectivity, Catch::Matchers::WithinAbs(double(n), 1e-9));
    for (std::size_t i = 1; i < n; ++i)
        CHECK_THAT(sk.laplacian_eigenvalues[i], Catch::Matchers::WithinAbs(double(n), 1e-9));

    const Graph lonely(1, {});
    CHECK(spectral_summary(lonely).algebraic_connectivity == 0.0);
}

TEST_CASE("connectivity: combinatorial vs spectral on random graphs") {
    std::mt19937 rng(99);
    int connected_seen = 0, disconnected_seen = 0;
    for (int trial = 0; trial < 120; ++trial) {
        const std::size_t n = 2 + trial % 12;
        const Graph g = oracle::random_graph(rng, n, 0.25);
        const bool combinatorial = is_connected(g);
        const bool spectral = spectral_summary(g).algebraic_connectivity > 1e-8;
        CHECK(combinatorial == spectral);
        (combinatorial ? connected_seen : disconnected_seen)++;
    }
    CHECK(connected_seen > 10);
    CHECK(disconnected_seen > 10);
}

TEST_CASE("zero eigenvalue multiplicity counts components") {
    std::mt19937 rng(123);
    for (int trial = 0; trial < 40; ++trial) {
        const std::size_t n = 4 + trial % 9;
        const Graph g = oracle::random_graph(rng, n, 0.18);
        const int comps = oracle::component_count(n, g.edges());
        const auto ev = spectral_summary(g).laplacian_eigenvalues;
        int zeros = 0;
        for (double v : ev) {
            CHECK(v >= -1e-9);
            if (std::abs(v) < 1e-8) ++zeros;
        }
        CHECK(zeros == comps);
    }
}

TEST_CASE("is_connected basics") {
    CHECK(is_connected(Graph(3, {{0, 1}, {1, 2}})));
    CHECK_FALSE(is_connected(Graph(2, {})));

    // deleting a star's center disconnects the leaves
    const Graph star(5, {{0, 1}, {0, 2}, {0, 3}, {0, 4}});
    CHECK(is_connected(star));
    const dfc::VertexRemoval removed = remove_vertices(star, {0});
    CHECK(removed.graph.n_vertices() == 4);
    CHECK(removed.graph.edges().empty());
    CHECK_FALSE(is_connected(removed.graph));
}

TEST_CASE("remove_vertices") {
    const Graph k3(3, {{0, 1}, {0, 2}, {1, 2}});

    const dfc::VertexRemoval same = remove_vertices(k3, {});
    CHECK(same.graph.n_vertices() == 3);
    CHECK(same.graph.edges().size() == 3);
    for (std::uint32_t i = 0; i < 3; ++i) CHECK(same.old_to_new[i] == i);

    const dfc::VertexRemoval pair = remove_vertices(k3, {2});
    CHECK(pair.graph.n_vertices() == 2);
    REQUIRE(pair.graph.edges().size() == 1);
    CHECK(pair.old_to_new[2] == dfc::kRemovedVertex);

    const Graph path(3, {{0, 1}, {1, 2}});
    const dfc::VertexRemoval split = remove_vertices(path, {1});
    CHECK(split.graph.n_vertices() == 2);
    CHECK(split.graph.edges().empty());
    CHECK_FALSE(is_connected(split.graph));

    CHECK_THROWS_AS(remove_vertices(k3, {0, 1, 2}), std::invalid_argument);
    CHECK_THROWS_AS(remove_vertices(k3, {5}), std::invalid_argument);
}

TEST_CASE("geometric graph grows radius until connected") {
    std::mt19937 rng(5);
    const std::vector<dfc::Vec2> cloud = oracle::random_cloud(rng, 40, 3.0, 1.0);
    const dfc::GeometricGraphResult g = geometric_graph(cloud, 0.05);
    CHECK(is_connected(g.graph));
    CHECK(g.radius >= 0.05);
    // deterministic for the same input
    const dfc::GeometricGraphResult g2 = geometric_graph(cloud, 0.05);
    CHECK(g2.radius == g.radius);
    CHECK(g2.graph.edges().size() == g.graph.edges().size());
}

TEST_CASE("jacobi eigensolver flags non-convergence instead of lying") {
    const Graph k2(2, {{0, 1}});
    CHECK_THROWS_AS(dfc::symmetric_eigenvalues(laplacian(k2), 1e-10, 0),
                    std::runtime_error);
}
