#include "ncrhok/netgen.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <sstream>
#include <vector>

#include "ncrhok/errors.hpp"

namespace ncrhok {

Topology topology_from_string(const std::string& s) {
    if (s == "er") return Topology::Er;
    if (s == "sf") return Topology::Sf;
    if (s == "qsn") return Topology::Qsn;
    if (s == "sw") return Topology::Sw;
    throw InputError("unknown topology '" + s + "' (expected er, sf, qsn, or sw)");
}

std::string to_string(Topology t) {
    switch (t) {
        case Topology::Er: return "er";
        case Topology::Sf: return "sf";
        case Topology::Qsn: return "qsn";
        case Topology::Sw: return "sw";
    }
    throw InputError("invalid topology value");
}

namespace {

std::string fmt_double(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

/** Edge budget M = round(n * k_avg), validated against the simple-digraph capacity. */
std::size_t edge_budget(int n, double k_avg) {
    if (n < 1) throw InputError("generator needs n >= 1, got " + std::to_string(n));
    if (!(k_avg >= 0.0)) throw InputError("k_avg must be non-negative");
    const double m = std::llround(static_cast<double>(n) * k_avg);
    const double cap = static_cast<double>(n) * (n - 1);
    if (m > cap)
        throw InputError("edge budget " + std::to_string(static_cast<long long>(m)) +
                         " exceeds simple-digraph capacity n(n-1) = " +
                         std::to_string(static_cast<long long>(cap)));
    return static_cast<std::size_t>(m);
}

/** Random ordered pair (u, v), u != v, uniform over all n(n-1) pairs. */
std::pair<NodeId, NodeId> random_pair(int n, Rng& rng) {
    const auto u = static_cast<NodeId>(rng.next_below(static_cast<std::uint64_t>(n)));
    auto v = static_cast<NodeId>(rng.next_below(static_cast<std::uint64_t>(n - 1)));
    if (v >= u) ++v;
    return {u, v};
}

} // namespace

DirectedGraph gen_er(int n, double k_avg, Rng& rng) {
    const std::size_t m = edge_budget(n, k_avg);
    const std::size_t cap = static_cast<std::size_t>(n) * static_cast<std::size_t>(n - 1);
    DirectedGraph g(n);

    if (m * 2 <= cap) {
        // Sparse regime: rejection sampling terminates quickly.
        std::size_t placed = 0;
        while (placed < m) {
            auto [u, v] = random_pair(n, rng);
            if (g.add_edge(u, v)) ++placed;
        }
        return g;
    }

    // Dense regime: partial Fisher-Yates over all ordered-pair codes.
    std::vector<std::uint64_t> codes;
    codes.reserve(cap);
    for (NodeId u = 0; u < n; ++u)
        for (NodeId v = 0; v < n; ++v)
            if (u != v) codes.push_back(static_cast<std::uint64_t>(u) * n + v);
    for (std::size_t i = 0; i < m; ++i) {
        const std::size_t j = i + static_cast<std::size_t>(rng.next_below(codes.size() - i));
        std::swap(codes[i], codes[j]);
        const auto u = static_cast<NodeId>(codes[i] / static_cast<std::uint64_t>(n));
        const auto v = static_cast<NodeId>(codes[i] % static_cast<std::uint64_t>(n));
        g.add_edge(u, v);
    }
    return g;
}

DirectedGraph gen_sf(int n, double k_avg, Rng& rng, double beta, double theta) {
    if (!(beta >= 0.0)) throw InputError("sf: beta must be non-negative");
    if (!(theta > -1.0)) throw InputError("sf: theta must exceed -1");
    const std::size_t m = edge_budget(n, k_avg);

    // Cumulative weights over ids i = 1..n (node id i-1); w_i = (i + theta)^(-beta).
    std::vector<double> cum(static_cast<std::size_t>(n));
    double total = 0.0;
    for (int i = 1; i <= n; ++i) {
        total += std::pow(static_cast<double>(i) + theta, -beta);
        cum[static_cast<std::size_t>(i - 1)] = total;
    }
    auto draw = [&]() -> NodeId {
        const double x = rng.next_double() * total;
        const auto it = std::upper_bound(cum.begin(), cum.end(), x);
        return static_cast<NodeId>(std::min<std::ptrdiff_t>(it - cum.begin(), n - 1));
    };

    DirectedGraph g(n);
    const std::size_t max_attempts = 100 * m + 1000;
    std::size_t placed = 0;
    for (std::size_t attempt = 0; placed < m; ++attempt) {
        if (attempt >= max_attempts)
            throw InputError("sf: edge budget " + std::to_string(m) +
                             " not reachable within attempt cap; lower k_avg or beta");
        const NodeId u = draw();
        const NodeId v = draw();
        if (u == v) continue;
        if (g.add_edge(u, v)) ++placed;
    }
    return g;
}

DirectedGraph gen_qsn(int n, double k_avg, Rng& rng, int r_q) {
    if (r_q < 1) throw InputError("qsn: r_q must be >= 1");
    const std::size_t m = edge_budget(n, k_avg);
    const std::size_t chain = static_cast<std::size_t>(n > 0 ? n - 1 : 0);
    if (m < chain)
        throw InputError("qsn: edge budget " + std::to_string(m) +
                         " below the backbone chain size " + std::to_string(chain));

    // Snapback candidates u -> u - l*r_q, enumerated in fixed (u, l) order.
    std::vector<std::pair<NodeId, NodeId>> candidates;
    for (NodeId u = 1; u < n; ++u)
        for (NodeId t = u - static_cast<NodeId>(r_q); t >= 0; t -= static_cast<NodeId>(r_q))
            candidates.emplace_back(u, t);

    const std::size_t want = m - chain;
    if (want > candidates.size())
        throw InputError("qsn: edge budget " + std::to_string(m) + " exceeds chain + " +
                         std::to_string(candidates.size()) + " snapback candidates");

    const double q = candidates.empty()
                         ? 0.0
                         : static_cast<double>(want) / static_cast<double>(candidates.size());

    std::vector<std::size_t> placed, spare;
    for (std::size_t i = 0; i < candidates.size(); ++i) {
        if (rng.next_double() < q)
            placed.push_back(i);
        else
            spare.push_back(i);
    }
    // Trim or pad with uniformly random snapback-eligible edges to hit the budget.
    while (placed.size() > want) {
        const std::size_t j = static_cast<std::size_t>(rng.next_below(placed.size()));
        std::swap(placed[j], placed.back());
        placed.pop_back();
    }
    while (placed.size() < want) {
        const std::size_t j = static_cast<std::size_t>(rng.next_below(spare.size()));
        std::swap(spare[j], spare.back());
        placed.push_back(spare.back());
        spare.pop_back();
    }

    DirectedGraph g(n);
    for (NodeId i = 0; i + 1 < n; ++i) g.add_edge(i, i + 1);
    std::sort(placed.begin(), placed.end());
    for (std::size_t idx : placed) g.add_edge(candidates[idx].first, candidates[idx].second);
    return g;
}

DirectedGraph gen_sw(int n, double k_avg, Rng& rng) {
    if (n < 5) throw InputError("sw: requires n >= 5, got " + std::to_string(n));
    const std::size_t m = edge_budget(n, k_avg);

    DirectedGraph g(n);
    for (NodeId i = 0; i < n; ++i) {
        g.add_edge(i, (i + 1) % n);
        g.add_edge(i, (i + 2) % n);
    }

    if (m >= g.num_edges()) {
        const std::size_t max_attempts = 200 * (m + 1) + 10000;
        std::size_t attempt = 0;
        while (g.num_edges() < m) {
            if (attempt++ >= max_attempts)
                throw InputError("sw: edge budget " + std::to_string(m) +
                                 " not reachable within attempt cap");
            auto [u, v] = random_pair(n, rng);
            g.add_edge(u, v);
        }
        return g;
    }

    // Budget below the ring: drop uniformly random ring edges.
    auto edges = g.edges();
    const std::size_t keep = m;
    for (std::size_t i = 0; i < keep; ++i) {
        const std::size_t j = i + static_cast<std::size_t>(rng.next_below(edges.size() - i));
        std::swap(edges[i], edges[j]);
    }
    edges.resize(keep);
    std::sort(edges.begin(), edges.end());
    DirectedGraph trimmed(n);
    for (auto [u, v] : edges) trimmed.add_edge(u, v);
    return trimmed;
}

DirectedGraph generate(const GenSpec& spec) {
    Rng rng(spec.seed);
    switch (spec.topology) {
        case Topology::Er: return gen_er(spec.n, spec.k_avg, rng);
        case Topology::Sf: return gen_sf(spec.n, spec.k_avg, rng, spec.sf_beta, spec.sf_theta);
        case Topology::Qsn: return gen_qsn(spec.n, spec.k_avg, rng, spec.qsn_rq);
        case Topology::Sw: return gen_sw(spec.n, spec.k_avg, rng);
    }
    throw InputError("invalid topology value");
}

std::string GenSpec::to_manifest() const {
    std::string s = "topology=" + to_string(topology);
    s += " n=" + std::to_string(n);
    s += " k_avg=" + fmt_double(k_avg);
    s += " seed=" + std::to_string(seed);
    if (topology == Topology::Sf) {
        s += " sf_beta=" + fmt_double(sf_beta);
        s += " sf_theta=" + fmt_double(sf_theta);
    }
    if (topology == Topology::Qsn) s += " qsn_rq=" + std::to_string(qsn_rq);
    return s;
}

GenSpec GenSpec::from_manifest(const std::string& line) {
    GenSpec spec;
    bool saw_topology = false, saw_n = false, saw_k = false, saw_seed = false;
    std::istringstream in(line);
    std::string token;
    while (in >> token) {
        const auto eq = token.find('=');
        if (eq == std::string::npos)
            throw InputError("graph spec: token '" + token + "' is not key=value");
        const std::string key = token.substr(0, eq);
        const std::string val = token.substr(eq + 1);
        try {
            if (key == "topology") {
                spec.topology = topology_from_string(val);
                saw_topology = true;
            } else if (key == "n") {
                spec.n = std::stoi(val);
                saw_n = true;
            } else if (key == "k_avg") {
                spec.k_avg = std::stod(val);
                saw_k = true;
            } else if (key == "seed") {
                spec.seed = std::stoull(val);
                saw_seed = true;
            } else if (key == "sf_beta") {
                spec.sf_beta = std::stod(val);
            } else if (key == "sf_theta") {
                spec.sf_theta = std::stod(val);
            } else if (key == "qsn_rq") {
                spec.qsn_rq = std::stoi(val);
            } else {
                throw InputError("graph spec: unknown key '" + key + "'");
            }
        } catch (const std::invalid_argument&) {
            throw InputError("graph spec: bad value for '" + key + "': '" + val + "'");
        } catch (const std::out_of_range&) {
            throw InputError("graph spec: value out of range for '" + key + "': '" + val + "'");
        }
    }
    if (!saw_topology || !saw_n || !saw_k || !saw_seed)
        throw InputError("graph spec: need topology, n, k_avg, and seed in '" + line + "'");
    return spec;
}

} // namespace ncrhok
