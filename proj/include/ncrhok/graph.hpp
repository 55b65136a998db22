#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ncrhok/rng.hpp"

namespace ncrhok {

using NodeId = std::int32_t;

/**
 * Simple directed graph (no self-loops, no duplicate edges) with both out- and
 * in-adjacency kept sorted ascending. Node ids are dense: 0..n-1.
 */
class DirectedGraph {
public:
    explicit DirectedGraph(int n);

    int num_nodes() const { return n_; }
    std::size_t num_edges() const { return m_; }

    bool has_edge(NodeId u, NodeId v) const;

    /**
     * Insert edge u->v. Returns false if the edge already exists (graph
     * unchanged). Throws InputError on self-loops or out-of-range ids.
     */
    bool add_edge(NodeId u, NodeId v);

    const std::vector<NodeId>& out_neighbors(NodeId u) const { return out_[check(u)]; }
    const std::vector<NodeId>& in_neighbors(NodeId v) const { return in_[check(v)]; }

    int out_degree(NodeId u) const { return static_cast<int>(out_[check(u)].size()); }
    int in_degree(NodeId v) const { return static_cast<int>(in_[check(v)].size()); }
    int total_degree(NodeId v) const { return out_degree(v) + in_degree(v); }

    /** All edges as (src, dst) pairs, ascending by src then dst. */
    std::vector<std::pair<NodeId, NodeId>> edges() const;

private:
    NodeId check(NodeId v) const;

    int n_;
    std::size_t m_ = 0;
    std::vector<std::vector<NodeId>> out_;
    std::vector<std::vector<NodeId>> in_;
};

/**
 * Soft-delete overlay for attack simulation: marks nodes dead without touching
 * the underlying graph, so each simulation step is O(1) bookkeeping.
 */
class NodeMask {
public:
    explicit NodeMask(int n) : alive_(static_cast<std::size_t>(n), 1), alive_count_(n) {}

    bool alive(NodeId v) const { return alive_[static_cast<std::size_t>(v)] != 0; }
    int alive_count() const { return alive_count_; }
    int size() const { return static_cast<int>(alive_.size()); }

    void kill(NodeId v);

private:
    std::vector<std::uint8_t> alive_;
    int alive_count_;
};

/** Out-degree of u counting only alive targets (u itself need not be alive). */
int masked_out_degree(const DirectedGraph& g, const NodeMask& mask, NodeId u);
int masked_in_degree(const DirectedGraph& g, const NodeMask& mask, NodeId v);
int masked_total_degree(const DirectedGraph& g, const NodeMask& mask, NodeId v);

/**
 * Hard removal: new graph with n-1 nodes, ids above v shifted down by one,
 * edges incident to v dropped, all other edges preserved.
 */
DirectedGraph remove_node(const DirectedGraph& g, NodeId v);

enum class BallMode {
    Undirected, ///< hops may traverse edges in either direction (default)
    Out,        ///< hops follow edge direction only
};

/**
 * Sorted ids of every node reachable from `center` within `k` hops, including
 * the center itself (k = 0 gives {center}).
 */
std::vector<NodeId> k_ball(const DirectedGraph& g, NodeId center, int k,
                           BallMode mode = BallMode::Undirected);

/**
 * Text edge-list IO. Format: optional '#' comment lines, then a line holding
 * the node count, then one "src<TAB>dst" line per edge. save_edge_list writes
 * edges in ascending (src, dst) order so equal graphs produce equal bytes.
 */
DirectedGraph load_edge_list(const std::string& path);
void save_edge_list(const DirectedGraph& g, const std::string& path);

/** Parse / serialize the edge-list format to a string (same grammar as the file IO). */
DirectedGraph parse_edge_list(const std::string& text, const std::string& origin = "<string>");
std::string format_edge_list(const DirectedGraph& g);

/**
 * Resize to exactly `target_n` nodes: while too large, delete a uniformly
 * random node (ids re-compacted); while too small, append isolated nodes.
 */
DirectedGraph resize_random(const DirectedGraph& g, int target_n, Rng& rng);

} // namespace ncrhok
