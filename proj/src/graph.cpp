#include "ncrhok/graph.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <sstream>

#include "ncrhok/errors.hpp"

namespace ncrhok {

DirectedGraph::DirectedGraph(int n) : n_(n) {
    if (n < 0) throw InputError("graph size must be non-negative, got " + std::to_string(n));
    out_.resize(static_cast<std::size_t>(n));
    in_.resize(static_cast<std::size_t>(n));
}

NodeId DirectedGraph::check(NodeId v) const {
    if (v < 0 || v >= n_)
        throw InputError("node id " + std::to_string(v) + " out of range [0, " +
                         std::to_string(n_) + ")");
    return v;
}

bool DirectedGraph::has_edge(NodeId u, NodeId v) const {
    check(v);
    const auto& nbrs = out_[static_cast<std::size_t>(check(u))];
    return std::binary_search(nbrs.begin(), nbrs.end(), v);
}

bool DirectedGraph::add_edge(NodeId u, NodeId v) {
    check(u);
    check(v);
    if (u == v)
        throw InputError("self-loop " + std::to_string(u) + "->" + std::to_string(v) +
                         " not allowed");
    auto& fwd = out_[static_cast<std::size_t>(u)];
    auto it = std::lower_bound(fwd.begin(), fwd.end(), v);
    if (it != fwd.end() && *it == v) return false;
    fwd.insert(it, v);
    auto& bwd = in_[static_cast<std::size_t>(v)];
    bwd.insert(std::lower_bound(bwd.begin(), bwd.end(), u), u);
    ++m_;
    return true;
}

std::vector<std::pair<NodeId, NodeId>> DirectedGraph::edges() const {
    std::vector<std::pair<NodeId, NodeId>> es;
    es.reserve(m_);
    for (NodeId u = 0; u < n_; ++u)
        for (NodeId v : out_[static_cast<std::size_t>(u)]) es.emplace_back(u, v);
    return es;
}

void NodeMask::kill(NodeId v) {
    auto& cell = alive_.at(static_cast<std::size_t>(v));
    if (cell == 0) throw InputError("node " + std::to_string(v) + " already removed");
    cell = 0;
    --alive_count_;
}

int masked_out_degree(const DirectedGraph& g, const NodeMask& mask, NodeId u) {
    int d = 0;
    for (NodeId v : g.out_neighbors(u)) d += mask.alive(v) ? 1 : 0;
    return d;
}

int masked_in_degree(const DirectedGraph& g, const NodeMask& mask, NodeId v) {
    int d = 0;
    for (NodeId u : g.in_neighbors(v)) d += mask.alive(u) ? 1 : 0;
    return d;
}

int masked_total_degree(const DirectedGraph& g, const NodeMask& mask, NodeId v) {
    return masked_out_degree(g, mask, v) + masked_in_degree(g, mask, v);
}

DirectedGraph remove_node(const DirectedGraph& g, NodeId v) {
    if (v < 0 || v >= g.num_nodes())
        throw InputError("remove_node: id " + std::to_string(v) + " out of range");
    DirectedGraph h(g.num_nodes() - 1);
    auto shift = [v](NodeId x) { return x > v ? x - 1 : x; };
    for (NodeId u = 0; u < g.num_nodes(); ++u) {
        if (u == v) continue;
        for (NodeId w : g.out_neighbors(u)) {
            if (w == v) continue;
            h.add_edge(shift(u), shift(w));
        }
    }
    return h;
}

std::vector<NodeId> k_ball(const DirectedGraph& g, NodeId center, int k, BallMode mode) {
    if (center < 0 || center >= g.num_nodes())
        throw InputError("k_ball: center " + std::to_string(center) + " out of range");
    if (k < 0) throw InputError("k_ball: negative radius");

    std::vector<int> depth(static_cast<std::size_t>(g.num_nodes()), -1);
    std::vector<NodeId> queue;
    queue.push_back(center);
    depth[static_cast<std::size_t>(center)] = 0;
    for (std::size_t head = 0; head < queue.size(); ++head) {
        const NodeId u = queue[head];
        const int d = depth[static_cast<std::size_t>(u)];
        if (d == k) continue;
        auto visit = [&](NodeId w) {
            if (depth[static_cast<std::size_t>(w)] < 0) {
                depth[static_cast<std::size_t>(w)] = d + 1;
                queue.push_back(w);
            }
        };
        for (NodeId w : g.out_neighbors(u)) visit(w);
        if (mode == BallMode::Undirected)
            for (NodeId w : g.in_neighbors(u)) visit(w);
    }
    std::sort(queue.begin(), queue.end());
    return queue;
}

namespace {

bool is_comment_or_blank(const std::string& line) {
    for (char c : line) {
        if (c == ' ' || c == '\t' || c == '\r') continue;
        return c == '#';
    }
    return true;
}

long parse_int_token(const char*& p, const char* end, int line_no, const std::string& origin) {
    while (p < end && (*p == ' ' || *p == '\t')) ++p;
    long value = 0;
    auto [next, ec] = std::from_chars(p, end, value);
    if (ec != std::errc() || next == p)
        throw InputError(origin + ":" + std::to_string(line_no) + ": expected integer");
    p = next;
    return value;
}

} // namespace

DirectedGraph parse_edge_list(const std::string& text, const std::string& origin) {
    std::istringstream in(text);
    std::string line;
    int line_no = 0;
    long n = -1;
    std::vector<std::pair<long, long>> pending;

    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (is_comment_or_blank(line)) continue;

        const char* p = line.data();
        const char* end = line.data() + line.size();
        if (n < 0) {
            n = parse_int_token(p, end, line_no, origin);
            while (p < end && (*p == ' ' || *p == '\t')) ++p;
            if (p != end)
                throw InputError(origin + ":" + std::to_string(line_no) +
                                 ": node-count line has trailing tokens");
            if (n < 0)
                throw InputError(origin + ":" + std::to_string(line_no) + ": negative node count");
            continue;
        }
        const long u = parse_int_token(p, end, line_no, origin);
        const long v = parse_int_token(p, end, line_no, origin);
        while (p < end && (*p == ' ' || *p == '\t')) ++p;
        if (p != end)
            throw InputError(origin + ":" + std::to_string(line_no) + ": trailing tokens after edge");
        if (u < 0 || u >= n || v < 0 || v >= n)
            throw InputError(origin + ":" + std::to_string(line_no) + ": edge " + std::to_string(u) +
                             "->" + std::to_string(v) + " out of range for n=" + std::to_string(n));
        if (u == v)
            throw InputError(origin + ":" + std::to_string(line_no) + ": self-loop not allowed");
        pending.emplace_back(u, v);
    }
    if (n < 0) throw InputError(origin + ": missing node-count line");

    DirectedGraph g(static_cast<int>(n));
    for (auto [u, v] : pending) {
        if (!g.add_edge(static_cast<NodeId>(u), static_cast<NodeId>(v)))
            throw InputError(origin + ": duplicate edge " + std::to_string(u) + "->" +
                             std::to_string(v));
    }
    return g;
}

std::string format_edge_list(const DirectedGraph& g) {
    std::string out;
    out += std::to_string(g.num_nodes());
    out += '\n';
    for (NodeId u = 0; u < g.num_nodes(); ++u) {
        for (NodeId v : g.out_neighbors(u)) {
            out += std::to_string(u);
            out += '\t';
            out += std::to_string(v);
            out += '\n';
        }
    }
    return out;
}

DirectedGraph load_edge_list(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InputError("cannot open edge list '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_edge_list(buf.str(), path);
}

void save_edge_list(const DirectedGraph& g, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw InputError("cannot write edge list '" + path + "'");
    out << format_edge_list(g);
    if (!out) throw InputError("write failed for '" + path + "'");
}

DirectedGraph resize_random(const DirectedGraph& g, int target_n, Rng& rng) {
    if (target_n < 0) throw InputError("resize_random: negative target size");
    DirectedGraph cur = g;
    while (cur.num_nodes() > target_n) {
        const NodeId victim = static_cast<NodeId>(rng.next_below(static_cast<std::uint64_t>(cur.num_nodes())));
        cur = remove_node(cur, victim);
    }
    if (cur.num_nodes() < target_n) {
        DirectedGraph grown(target_n);
        for (auto [u, v] : cur.edges()) grown.add_edge(u, v);
        cur = std::move(grown);
    }
    return cur;
}

} // namespace ncrhok
