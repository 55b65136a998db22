#include "doctest.h"

#include <algorithm>
#include <numeric>
#include <vector>

#include "ncrhok/errors.hpp"
#include "ncrhok/hypergraph.hpp"
#include "ncrhok/netgen.hpp"

using namespace ncrhok;

TEST_SUITE("hypergraph") {

TEST_CASE("k-hop with k=1 collects the closed neighborhood") {
    DirectedGraph g(5);
    g.add_edge(0, 1);
    g.add_edge(2, 0);
    g.add_edge(3, 2);
    // node 4 is isolated

    auto h = build_khop(g, 1);
    REQUIRE(h.num_edges() == 5);
    CHECK(h.edges[0] == std::vector<NodeId>{0, 1, 2});
    CHECK(h.edges[1] == std::vector<NodeId>{0, 1});
    CHECK(h.edges[2] == std::vector<NodeId>{0, 2, 3});
    CHECK(h.edges[3] == std::vector<NodeId>{2, 3});
    CHECK(h.edges[4] == std::vector<NodeId>{4});

    auto forward = build_khop(g, 1, BallMode::Out);
    CHECK(forward.edges[0] == std::vector<NodeId>{0, 1});
    CHECK(forward.edges[1] == std::vector<NodeId>{1});
    CHECK(forward.edges[3] == std::vector<NodeId>{2, 3});
}

TEST_CASE("k-hop on a chain") {
    DirectedGraph g(4);
    g.add_edge(0, 1);
    g.add_edge(1, 2);
    g.add_edge(2, 3);
    auto h = build_khop(g, 2);
    CHECK(h.edges[0] == std::vector<NodeId>{0, 1, 2});
    CHECK(h.edges[1] == std::vector<NodeId>{0, 1, 2, 3});
    CHECK(h.edges[3] == std::vector<NodeId>{1, 2, 3});
    CHECK_THROWS_AS(build_khop(g, 0), InputError);
}

TEST_CASE("k-hop hyperedges grow monotonically with k") {
    GenSpec spec;
    spec.topology = Topology::Er;
    spec.n = 40;
    spec.k_avg = 3.0;
    spec.seed = 17;
    auto g = generate(spec);
    auto h1 = build_khop(g, 1);
    auto h2 = build_khop(g, 2);
    auto h3 = build_khop(g, 3);
    for (int j = 0; j < 40; ++j) {
        CHECK(std::includes(h2.edges[j].begin(), h2.edges[j].end(), h1.edges[j].begin(),
                            h1.edges[j].end()));
        CHECK(std::includes(h3.edges[j].begin(), h3.edges[j].end(), h2.edges[j].begin(),
                            h2.edges[j].end()));
        CHECK(std::binary_search(h3.edges[j].begin(), h3.edges[j].end(), j));
    }
}

TEST_CASE("k-nn picks nearest rows with ties to the lowest id") {
    // 1-d embeddings 0, 1, 3: pairwise distances 1, 2, 3
    auto h = build_knn(3, 1, {0.0, 1.0, 3.0}, 1);
    CHECK(h.edges[0] == std::vector<NodeId>{0, 1});
    CHECK(h.edges[1] == std::vector<NodeId>{0, 1});
    CHECK(h.edges[2] == std::vector<NodeId>{1, 2});

    // identical embeddings: neighbors are the k lowest ids other than the anchor
    auto tie = build_knn(5, 2, std::vector<double>(10, 0.5), 2);
    CHECK(tie.edges[0] == std::vector<NodeId>{0, 1, 2});
    CHECK(tie.edges[3] == std::vector<NodeId>{0, 1, 3});
    CHECK(tie.edges[4] == std::vector<NodeId>{0, 1, 4});

    for (const auto& e : tie.edges) CHECK(e.size() == 3); // min(k, n-1) + 1
}

TEST_CASE("k-nn clamps oversized k and validates input") {
    auto h = build_knn(3, 1, {0.0, 5.0, 9.0}, 10);
    for (const auto& e : h.edges) CHECK(e == std::vector<NodeId>{0, 1, 2});

    CHECK_THROWS_AS(build_knn(0, 1, {}, 1), InputError);
    CHECK_THROWS_AS(build_knn(2, 0, {}, 1), InputError);
    CHECK_THROWS_AS(build_knn(2, 1, {0.0}, 1), ShapeError);
    CHECK_THROWS_AS(build_knn(2, 1, {0.0, 1.0}, 0), InputError);
}

TEST_CASE("primal and dual indexes stay consistent") {
    GenSpec spec;
    spec.topology = Topology::Sf;
    spec.n = 30;
    spec.k_avg = 4.0;
    spec.seed = 5;
    auto g = generate(spec);
    auto h = build_khop(g, 2);

    std::vector<std::vector<int>> rebuilt(static_cast<std::size_t>(h.n));
    for (int j = 0; j < h.num_edges(); ++j)
        for (NodeId v : h.edges[static_cast<std::size_t>(j)])
            rebuilt[static_cast<std::size_t>(v)].push_back(j);
    CHECK(rebuilt == h.node_edges);
}

TEST_CASE("dense incidence matches the sparse lists") {
    Hypergraph h = make_hypergraph(4, {{0, 1}, {1, 2, 3}, {3}});
    auto a = incidence_dense(h);
    REQUIRE(a.size() == 12);
    const std::vector<std::uint8_t> expect = {1, 0, 0, 1, 1, 0, 0, 1, 0, 0, 1, 1};
    CHECK(a == expect);

    for (int j = 0; j < h.num_edges(); ++j) {
        int col = 0;
        for (int v = 0; v < h.n; ++v) col += a[static_cast<std::size_t>(v) * 3 + j];
        CHECK(col == static_cast<int>(h.edges[static_cast<std::size_t>(j)].size()));
    }
    for (int v = 0; v < h.n; ++v) {
        int row = std::accumulate(a.begin() + static_cast<std::ptrdiff_t>(v) * 3,
                                  a.begin() + static_cast<std::ptrdiff_t>(v) * 3 + 3, 0);
        CHECK(row == static_cast<int>(h.node_edges[static_cast<std::size_t>(v)].size()));
    }

    // singleton hyperedge per node materializes as the identity matrix
    Hypergraph eye = make_hypergraph(3, {{0}, {1}, {2}});
    CHECK(incidence_dense(eye) ==
          std::vector<std::uint8_t>{1, 0, 0, 0, 1, 0, 0, 0, 1});

    CHECK_THROWS_AS(incidence_dense(h, 8), InputError);
}

TEST_CASE("hypergraph invariants are enforced") {
    CHECK_THROWS_AS(make_hypergraph(3, {{}}), InputError);
    CHECK_THROWS_AS(make_hypergraph(3, {{0, 3}}), InputError);
    CHECK_THROWS_AS(make_hypergraph(3, {{-1}}), InputError);
    CHECK_THROWS_AS(make_hypergraph(3, {{1, 1}}), InputError);
    CHECK_THROWS_AS(make_hypergraph(-1, {}), InputError);
}

TEST_CASE("text dump lists one hyperedge per line") {
    Hypergraph h = make_hypergraph(4, {{2, 0}, {3}});
    CHECK(format_hypergraph(h) == "0 2\n3\n");
}

} // TEST_SUITE
