#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ncrhok/graph.hpp"

namespace ncrhok {

/**
 * Hypergraph over n nodes stored both ways: per-hyperedge member lists and
 * per-node lists of containing hyperedges. Member lists are sorted; every
 * hyperedge is non-empty.
 */
struct Hypergraph {
    int n = 0;
    std::vector<std::vector<NodeId>> edges;      ///< hyperedge id -> sorted member nodes
    std::vector<std::vector<int>> node_edges;    ///< node id -> sorted containing hyperedges

    int num_edges() const { return static_cast<int>(edges.size()); }
};

/** Builds the dual (node -> hyperedges) index and validates the invariants. */
Hypergraph make_hypergraph(int n, std::vector<std::vector<NodeId>> edges);

/**
 * One hyperedge per node: the k-ball around it, so hyperedge j always
 * contains node j. Mode selects which edge directions a hop may traverse.
 */
Hypergraph build_khop(const DirectedGraph& g, int k, BallMode mode = BallMode::Undirected);

/**
 * One hyperedge per node from embedding-space proximity: node j plus its k
 * nearest other rows by Euclidean distance, ties broken by lowest node id.
 * k >= n clamps to n - 1 with a warning on stderr.
 */
Hypergraph build_knn(int n, int d, const std::vector<double>& embeddings, int k);

/** Row-major n x m boolean incidence matrix; refuses above the cell guard. */
std::vector<std::uint8_t> incidence_dense(const Hypergraph& h,
                                          std::size_t max_cells = 100'000'000);

/** One line per hyperedge: space-separated member ids. */
std::string format_hypergraph(const Hypergraph& h);

} // namespace ncrhok
