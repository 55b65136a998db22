#include "ncrhok/hypergraph.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <numeric>
#include <sstream>

#include "ncrhok/errors.hpp"

namespace ncrhok {

Hypergraph make_hypergraph(int n, std::vector<std::vector<NodeId>> edges) {
    if (n < 0) throw InputError("negative node count");
    Hypergraph h;
    h.n = n;
    h.edges = std::move(edges);
    h.node_edges.assign(static_cast<std::size_t>(n), {});
    for (std::size_t j = 0; j < h.edges.size(); ++j) {
        auto& members = h.edges[j];
        if (members.empty())
            throw InputError("hyperedge " + std::to_string(j) + " is empty");
        std::sort(members.begin(), members.end());
        if (std::adjacent_find(members.begin(), members.end()) != members.end())
            throw InputError("hyperedge " + std::to_string(j) + " repeats a node");
        for (NodeId v : members) {
            if (v < 0 || v >= n)
                throw InputError("hyperedge " + std::to_string(j) + " references node " +
                                 std::to_string(v) + " outside [0, " + std::to_string(n) + ")");
            h.node_edges[static_cast<std::size_t>(v)].push_back(static_cast<int>(j));
        }
    }
    return h;
}

Hypergraph build_khop(const DirectedGraph& g, int k, BallMode mode) {
    if (k < 1) throw InputError("hop count must be at least 1");
    const int n = g.num_nodes();
    std::vector<std::vector<NodeId>> edges;
    edges.reserve(static_cast<std::size_t>(n));
    for (NodeId v = 0; v < n; ++v) edges.push_back(k_ball(g, v, k, mode));
    return make_hypergraph(n, std::move(edges));
}

Hypergraph build_knn(int n, int d, const std::vector<double>& embeddings, int k) {
    if (n < 1) throw InputError("k-nn hypergraph needs at least one node");
    if (d < 1) throw InputError("embedding dimension must be at least 1");
    if (k < 1) throw InputError("neighbor count must be at least 1");
    if (embeddings.size() != static_cast<std::size_t>(n) * static_cast<std::size_t>(d))
        throw ShapeError("embedding buffer size does not match " + std::to_string(n) + "x" +
                         std::to_string(d));
    if (k >= n) {
        std::cerr << "warning: k = " << k << " >= n = " << n << ", clamping to " << (n - 1)
                  << "\n";
        k = n - 1;
    }

    std::vector<std::vector<NodeId>> edges(static_cast<std::size_t>(n));
    std::vector<std::pair<double, NodeId>> dist;
    dist.reserve(static_cast<std::size_t>(n) - 1);
    for (NodeId j = 0; j < n; ++j) {
        dist.clear();
        const double* row_j = embeddings.data() + static_cast<std::size_t>(j) * d;
        for (NodeId i = 0; i < n; ++i) {
            if (i == j) continue;
            const double* row_i = embeddings.data() + static_cast<std::size_t>(i) * d;
            double sq = 0.0;
            for (int c = 0; c < d; ++c) {
                const double diff = row_j[c] - row_i[c];
                sq += diff * diff;
            }
            dist.emplace_back(sq, i);
        }
        std::partial_sort(dist.begin(), dist.begin() + k, dist.end());
        auto& members = edges[static_cast<std::size_t>(j)];
        members.push_back(j);
        for (int t = 0; t < k; ++t) members.push_back(dist[static_cast<std::size_t>(t)].second);
    }
    return make_hypergraph(n, std::move(edges));
}

std::vector<std::uint8_t> incidence_dense(const Hypergraph& h, std::size_t max_cells) {
    const auto cells =
        static_cast<std::size_t>(h.n) * static_cast<std::size_t>(h.num_edges());
    if (cells > max_cells)
        throw InputError("dense incidence of " + std::to_string(h.n) + "x" +
                         std::to_string(h.num_edges()) + " exceeds the cell guard");
    std::vector<std::uint8_t> a(cells, 0);
    for (int j = 0; j < h.num_edges(); ++j)
        for (NodeId v : h.edges[static_cast<std::size_t>(j)])
            a[static_cast<std::size_t>(v) * static_cast<std::size_t>(h.num_edges()) +
              static_cast<std::size_t>(j)] = 1;
    return a;
}

std::string format_hypergraph(const Hypergraph& h) {
    std::ostringstream os;
    for (const auto& members : h.edges) {
        for (std::size_t i = 0; i < members.size(); ++i) {
            if (i) os << ' ';
            os << members[i];
        }
        os << '\n';
    }
    return os.str();
}

} // namespace ncrhok
