#include "ncrhok/centrality.hpp"

#include <algorithm>

#include "ncrhok/errors.hpp"

namespace ncrhok {

namespace {

std::vector<double> brandes_impl(const DirectedGraph& g, const NodeMask* mask) {
    const int n = g.num_nodes();
    std::vector<double> bc(static_cast<std::size_t>(n), 0.0);
    std::vector<double> sigma(static_cast<std::size_t>(n));
    std::vector<double> delta(static_cast<std::size_t>(n));
    std::vector<int> dist(static_cast<std::size_t>(n));
    std::vector<NodeId> order; // visit order; doubles as the BFS queue
    std::vector<std::vector<NodeId>> preds(static_cast<std::size_t>(n));
    order.reserve(static_cast<std::size_t>(n));

    auto alive = [&](NodeId v) { return mask == nullptr || mask->alive(v); };

    for (NodeId s = 0; s < n; ++s) {
        if (!alive(s)) continue;
        std::fill(sigma.begin(), sigma.end(), 0.0);
        std::fill(delta.begin(), delta.end(), 0.0);
        std::fill(dist.begin(), dist.end(), -1);
        order.clear();

        sigma[static_cast<std::size_t>(s)] = 1.0;
        dist[static_cast<std::size_t>(s)] = 0;
        order.push_back(s);
        for (std::size_t head = 0; head < order.size(); ++head) {
            const NodeId v = order[head];
            for (NodeId w : g.out_neighbors(v)) {
                if (!alive(w)) continue;
                if (dist[static_cast<std::size_t>(w)] < 0) {
                    dist[static_cast<std::size_t>(w)] = dist[static_cast<std::size_t>(v)] + 1;
                    order.push_back(w);
                }
                if (dist[static_cast<std::size_t>(w)] == dist[static_cast<std::size_t>(v)] + 1) {
                    sigma[static_cast<std::size_t>(w)] += sigma[static_cast<std::size_t>(v)];
                    preds[static_cast<std::size_t>(w)].push_back(v);
                }
            }
        }

        // Dependency accumulation in reverse BFS order.
        for (auto it = order.rbegin(); it != order.rend(); ++it) {
            const NodeId w = *it;
            for (NodeId v : preds[static_cast<std::size_t>(w)]) {
                delta[static_cast<std::size_t>(v)] +=
                    sigma[static_cast<std::size_t>(v)] / sigma[static_cast<std::size_t>(w)] *
                    (1.0 + delta[static_cast<std::size_t>(w)]);
            }
            if (w != s) bc[static_cast<std::size_t>(w)] += delta[static_cast<std::size_t>(w)];
            preds[static_cast<std::size_t>(w)].clear();
        }
    }
    return bc;
}

} // namespace

std::vector<double> brandes_bc(const DirectedGraph& g) { return brandes_impl(g, nullptr); }

std::vector<double> brandes_bc(const DirectedGraph& g, const NodeMask& mask) {
    return brandes_impl(g, &mask);
}

std::vector<double> naive_bc(const DirectedGraph& g) {
    const int n = g.num_nodes();
    if (n > 128)
        throw InputError("naive_bc is a reference implementation guarded to n <= 128, got n = " +
                         std::to_string(n));

    // Per-source shortest-path distances and counts.
    std::vector<std::vector<int>> dist(static_cast<std::size_t>(n),
                                       std::vector<int>(static_cast<std::size_t>(n), -1));
    std::vector<std::vector<double>> sigma(static_cast<std::size_t>(n),
                                           std::vector<double>(static_cast<std::size_t>(n), 0.0));
    std::vector<NodeId> queue;
    for (NodeId s = 0; s < n; ++s) {
        auto& d = dist[static_cast<std::size_t>(s)];
        auto& sg = sigma[static_cast<std::size_t>(s)];
        queue.clear();
        d[static_cast<std::size_t>(s)] = 0;
        sg[static_cast<std::size_t>(s)] = 1.0;
        queue.push_back(s);
        for (std::size_t head = 0; head < queue.size(); ++head) {
            const NodeId v = queue[head];
            for (NodeId w : g.out_neighbors(v)) {
                if (d[static_cast<std::size_t>(w)] < 0) {
                    d[static_cast<std::size_t>(w)] = d[static_cast<std::size_t>(v)] + 1;
                    queue.push_back(w);
                }
                if (d[static_cast<std::size_t>(w)] == d[static_cast<std::size_t>(v)] + 1)
                    sg[static_cast<std::size_t>(w)] += sg[static_cast<std::size_t>(v)];
            }
        }
    }

    std::vector<double> bc(static_cast<std::size_t>(n), 0.0);
    for (NodeId v = 0; v < n; ++v) {
        for (NodeId s = 0; s < n; ++s) {
            if (s == v) continue;
            const auto sv = dist[static_cast<std::size_t>(s)][static_cast<std::size_t>(v)];
            if (sv < 0) continue;
            for (NodeId t = 0; t < n; ++t) {
                if (t == s || t == v) continue;
                const auto st = dist[static_cast<std::size_t>(s)][static_cast<std::size_t>(t)];
                const auto vt = dist[static_cast<std::size_t>(v)][static_cast<std::size_t>(t)];
                if (st < 0 || vt < 0 || sv + vt != st) continue;
                bc[static_cast<std::size_t>(v)] +=
                    sigma[static_cast<std::size_t>(s)][static_cast<std::size_t>(v)] *
                    sigma[static_cast<std::size_t>(v)][static_cast<std::size_t>(t)] /
                    sigma[static_cast<std::size_t>(s)][static_cast<std::size_t>(t)];
            }
        }
    }
    return bc;
}

std::vector<double> minmax_normalized(const std::vector<double>& v) {
    if (v.empty()) return {};
    const auto [lo_it, hi_it] = std::minmax_element(v.begin(), v.end());
    const double lo = *lo_it, hi = *hi_it;
    std::vector<double> out(v.size(), 0.0);
    if (hi > lo) {
        const double span = hi - lo;
        for (std::size_t i = 0; i < v.size(); ++i) out[i] = (v[i] - lo) / span;
    }
    return out;
}

} // namespace ncrhok
