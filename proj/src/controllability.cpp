#include "ncrhok/controllability.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <gmpxx.h>

#include "ncrhok/centrality.hpp"
#include "ncrhok/errors.hpp"
#include "ncrhok/rng.hpp"

namespace ncrhok {

AttackKind attack_from_string(const std::string& s) {
    if (s == "ra") return AttackKind::Random;
    if (s == "tda") return AttackKind::Degree;
    if (s == "tba") return AttackKind::Betweenness;
    throw InputError("unknown attack '" + s + "' (expected ra, tda, or tba)");
}

std::string to_string(AttackKind k) {
    switch (k) {
        case AttackKind::Random: return "ra";
        case AttackKind::Degree: return "tda";
        case AttackKind::Betweenness: return "tba";
    }
    throw InputError("invalid attack value");
}

namespace {

/**
 * Hopcroft-Karp on the bipartite out/in split: left copy u matched to right
 * copy v for every alive edge u->v. Rebuilt from scratch per call.
 */
class HopcroftKarp {
public:
    HopcroftKarp(const DirectedGraph& g, const NodeMask* mask) : n_(g.num_nodes()) {
        head_.assign(static_cast<std::size_t>(n_) + 1, 0);
        auto alive = [&](NodeId v) { return mask == nullptr || mask->alive(v); };
        for (NodeId u = 0; u < n_; ++u) {
            if (alive(u))
                for (NodeId v : g.out_neighbors(u))
                    if (alive(v)) ++head_[static_cast<std::size_t>(u) + 1];
        }
        for (std::size_t i = 1; i < head_.size(); ++i) head_[i] += head_[i - 1];
        adj_.resize(head_.back());
        std::vector<int> cursor(head_.begin(), head_.end() - 1);
        for (NodeId u = 0; u < n_; ++u) {
            if (!alive(u)) continue;
            for (NodeId v : g.out_neighbors(u))
                if (alive(v)) adj_[static_cast<std::size_t>(cursor[static_cast<std::size_t>(u)]++)] = v;
        }
        match_l_.assign(static_cast<std::size_t>(n_), -1);
        match_r_.assign(static_cast<std::size_t>(n_), -1);
        dist_.resize(static_cast<std::size_t>(n_));
        queue_.reserve(static_cast<std::size_t>(n_));
    }

    std::size_t solve() {
        std::size_t matching = 0;
        while (bfs()) {
            for (NodeId u = 0; u < n_; ++u)
                if (match_l_[static_cast<std::size_t>(u)] < 0 && degree(u) > 0 && dfs(u)) ++matching;
        }
        return matching;
    }

private:
    int degree(NodeId u) const {
        return head_[static_cast<std::size_t>(u) + 1] - head_[static_cast<std::size_t>(u)];
    }

    bool bfs() {
        queue_.clear();
        for (NodeId u = 0; u < n_; ++u) {
            if (match_l_[static_cast<std::size_t>(u)] < 0 && degree(u) > 0) {
                dist_[static_cast<std::size_t>(u)] = 0;
                queue_.push_back(u);
            } else {
                dist_[static_cast<std::size_t>(u)] = -1;
            }
        }
        bool reachable = false;
        for (std::size_t i = 0; i < queue_.size(); ++i) {
            const NodeId u = queue_[i];
            for (int e = head_[static_cast<std::size_t>(u)]; e < head_[static_cast<std::size_t>(u) + 1]; ++e) {
                const NodeId v = adj_[static_cast<std::size_t>(e)];
                const NodeId w = match_r_[static_cast<std::size_t>(v)];
                if (w < 0) {
                    reachable = true;
                } else if (dist_[static_cast<std::size_t>(w)] < 0) {
                    dist_[static_cast<std::size_t>(w)] = dist_[static_cast<std::size_t>(u)] + 1;
                    queue_.push_back(w);
                }
            }
        }
        return reachable;
    }

    bool dfs(NodeId u) {
        for (int e = head_[static_cast<std::size_t>(u)]; e < head_[static_cast<std::size_t>(u) + 1]; ++e) {
            const NodeId v = adj_[static_cast<std::size_t>(e)];
            const NodeId w = match_r_[static_cast<std::size_t>(v)];
            if (w < 0 || (dist_[static_cast<std::size_t>(w)] == dist_[static_cast<std::size_t>(u)] + 1 && dfs(w))) {
                match_l_[static_cast<std::size_t>(u)] = v;
                match_r_[static_cast<std::size_t>(v)] = u;
                return true;
            }
        }
        dist_[static_cast<std::size_t>(u)] = -1;
        return false;
    }

    int n_;
    std::vector<int> head_;
    std::vector<NodeId> adj_;
    std::vector<NodeId> match_l_, match_r_;
    std::vector<int> dist_;
    std::vector<NodeId> queue_;
};

int driver_nodes_from_matching(int alive, std::size_t matching) {
    if (alive <= 0) return 0;
    return std::max(alive - static_cast<int>(matching), 1);
}

} // namespace

std::size_t max_matching_size(const DirectedGraph& g) {
    return HopcroftKarp(g, nullptr).solve();
}

std::size_t max_matching_size(const DirectedGraph& g, const NodeMask& mask) {
    return HopcroftKarp(g, &mask).solve();
}

int min_driver_nodes(const DirectedGraph& g) {
    return driver_nodes_from_matching(g.num_nodes(), max_matching_size(g));
}

int min_driver_nodes(const DirectedGraph& g, const NodeMask& mask) {
    return driver_nodes_from_matching(mask.alive_count(), max_matching_size(g, mask));
}

int adjacency_rank_exact(const DirectedGraph& g) {
    const int n = g.num_nodes();
    // Fraction-free (Bareiss) elimination over arbitrary-precision integers.
    std::vector<std::vector<mpz_class>> a(static_cast<std::size_t>(n),
                                          std::vector<mpz_class>(static_cast<std::size_t>(n), 0));
    for (auto [u, v] : g.edges()) a[static_cast<std::size_t>(u)][static_cast<std::size_t>(v)] = 1;

    mpz_class prev = 1;
    int rank = 0;
    for (int col = 0; col < n && rank < n; ++col) {
        int pivot = -1;
        for (int row = rank; row < n; ++row) {
            if (a[static_cast<std::size_t>(row)][static_cast<std::size_t>(col)] != 0) {
                pivot = row;
                break;
            }
        }
        if (pivot < 0) continue;
        std::swap(a[static_cast<std::size_t>(pivot)], a[static_cast<std::size_t>(rank)]);
        const auto& prow = a[static_cast<std::size_t>(rank)];
        for (int row = rank + 1; row < n; ++row) {
            auto& r = a[static_cast<std::size_t>(row)];
            for (int j = col + 1; j < n; ++j) {
                r[static_cast<std::size_t>(j)] =
                    (prow[static_cast<std::size_t>(col)] * r[static_cast<std::size_t>(j)] -
                     r[static_cast<std::size_t>(col)] * prow[static_cast<std::size_t>(j)]) /
                    prev;
            }
            r[static_cast<std::size_t>(col)] = 0;
        }
        prev = prow[static_cast<std::size_t>(col)];
        ++rank;
    }
    return rank;
}

int min_driver_nodes_undirected(const DirectedGraph& g) {
    for (auto [u, v] : g.edges())
        if (!g.has_edge(v, u))
            throw InputError("undirected driver count requires a symmetric graph; edge " +
                             std::to_string(u) + "->" + std::to_string(v) + " has no reverse");
    if (g.num_nodes() == 0) return 0;
    return std::max(g.num_nodes() - adjacency_rank_exact(g), 1);
}

RobustnessCurve simulate_attack(const DirectedGraph& g, const AttackSpec& spec) {
    const int n = g.num_nodes();
    RobustnessCurve curve;
    if (n < 2) return curve;
    curve.values.assign(static_cast<std::size_t>(n - 1), 0.0);

    const int repeats = spec.kind == AttackKind::Random ? std::max(1, spec.repeats) : 1;
    const BcFn bc = spec.bc_fn ? spec.bc_fn : BcFn([](const DirectedGraph& gg, const NodeMask& mm) {
        return brandes_bc(gg, mm);
    });

    for (int rep = 0; rep < repeats; ++rep) {
        Rng rng = Rng::derive(spec.seed, static_cast<std::uint64_t>(rep));
        NodeMask mask(n);

        // Static-ranking mode scores the intact graph once.
        std::vector<double> static_score;
        if (!spec.recompute) {
            static_score.resize(static_cast<std::size_t>(n));
            if (spec.kind == AttackKind::Degree) {
                for (NodeId v = 0; v < n; ++v)
                    static_score[static_cast<std::size_t>(v)] = g.total_degree(v);
            } else if (spec.kind == AttackKind::Betweenness) {
                static_score = bc(g, mask);
            }
        }

        for (int i = 1; i < n; ++i) {
            NodeId target = -1;
            switch (spec.kind) {
                case AttackKind::Random: {
                    auto pick = rng.next_below(static_cast<std::uint64_t>(mask.alive_count()));
                    for (NodeId v = 0; v < n; ++v) {
                        if (!mask.alive(v)) continue;
                        if (pick == 0) {
                            target = v;
                            break;
                        }
                        --pick;
                    }
                    break;
                }
                case AttackKind::Degree: {
                    double best = -1.0;
                    for (NodeId v = 0; v < n; ++v) {
                        if (!mask.alive(v)) continue;
                        const double score = spec.recompute
                                                 ? static_cast<double>(masked_total_degree(g, mask, v))
                                                 : static_score[static_cast<std::size_t>(v)];
                        if (score > best) {
                            best = score;
                            target = v;
                        }
                    }
                    break;
                }
                case AttackKind::Betweenness: {
                    std::vector<double> fresh;
                    const std::vector<double>& score =
                        spec.recompute ? (fresh = bc(g, mask)) : static_score;
                    double best = -1.0;
                    for (NodeId v = 0; v < n; ++v) {
                        if (!mask.alive(v)) continue;
                        if (score[static_cast<std::size_t>(v)] > best) {
                            best = score[static_cast<std::size_t>(v)];
                            target = v;
                        }
                    }
                    break;
                }
            }
            mask.kill(target);
            const int nd = min_driver_nodes(g, mask);
            curve.values[static_cast<std::size_t>(i - 1)] +=
                static_cast<double>(nd) / static_cast<double>(n - i);
        }
    }

    if (repeats > 1)
        for (double& v : curve.values) v /= static_cast<double>(repeats);
    return curve;
}

CurveBundle curve_metrics(std::vector<std::vector<double>> true_curves,
                          std::vector<std::vector<double>> pred_curves) {
    if (true_curves.size() != pred_curves.size())
        throw ShapeError("curve_metrics: " + std::to_string(true_curves.size()) + " true vs " +
                         std::to_string(pred_curves.size()) + " predicted curves");
    if (true_curves.empty()) throw ShapeError("curve_metrics: empty curve set");
    const std::size_t len = true_curves.front().size();
    if (len == 0) throw ShapeError("curve_metrics: zero-length curves");
    for (std::size_t i = 0; i < true_curves.size(); ++i)
        if (true_curves[i].size() != len || pred_curves[i].size() != len)
            throw ShapeError("curve_metrics: curve " + std::to_string(i) +
                             " length mismatch (expected " + std::to_string(len) + ")");

    CurveBundle bundle;
    bundle.er_curve.resize(len);
    bundle.sigma_curve.resize(len);
    const double m = static_cast<double>(true_curves.size());
    for (std::size_t j = 0; j < len; ++j) {
        double mean = 0.0;
        for (std::size_t i = 0; i < true_curves.size(); ++i)
            mean += std::abs(pred_curves[i][j] - true_curves[i][j]);
        mean /= m;
        double var = 0.0;
        for (std::size_t i = 0; i < true_curves.size(); ++i) {
            const double d = std::abs(pred_curves[i][j] - true_curves[i][j]) - mean;
            var += d * d;
        }
        bundle.er_curve[j] = mean;
        bundle.sigma_curve[j] = std::sqrt(var / m);
        bundle.er_mean += mean;
        bundle.sigma_mean += bundle.sigma_curve[j];
    }
    bundle.er_mean /= static_cast<double>(len);
    bundle.sigma_mean /= static_cast<double>(len);
    bundle.true_curves = std::move(true_curves);
    bundle.pred_curves = std::move(pred_curves);
    return bundle;
}

void save_curves_csv(const std::string& path, const std::vector<CurveRow>& rows) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw InputError("cannot write curves file '" + path + "'");
    out << "# ncrhok curves v1\n";
    char buf[40];
    for (const auto& row : rows) {
        if (!row.meta.empty()) out << "# " << row.meta << '\n';
        for (std::size_t j = 0; j < row.values.size(); ++j) {
            std::snprintf(buf, sizeof buf, "%.17g", row.values[j]);
            if (j) out << ',';
            out << buf;
        }
        out << '\n';
    }
    if (!out) throw InputError("write failed for '" + path + "'");
}

std::vector<CurveRow> load_curves_csv(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InputError("cannot open curves file '" + path + "'");
    std::vector<CurveRow> rows;
    std::string line, meta;
    int line_no = 0;
    bool first_comment = true;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        if (line[0] == '#') {
            std::size_t start = 1;
            while (start < line.size() && line[start] == ' ') ++start;
            if (first_comment && line.compare(start, 13, "ncrhok curves") == 0) {
                first_comment = false;
                continue;
            }
            first_comment = false;
            meta = line.substr(start);
            continue;
        }
        first_comment = false;
        CurveRow row;
        row.meta = std::exchange(meta, std::string{});
        std::size_t pos = 0;
        while (pos <= line.size()) {
            std::size_t comma = line.find(',', pos);
            if (comma == std::string::npos) comma = line.size();
            const std::string token = line.substr(pos, comma - pos);
            char* endp = nullptr;
            const double v = std::strtod(token.c_str(), &endp);
            if (endp == token.c_str() || *endp != '\0')
                throw InputError(path + ":" + std::to_string(line_no) + ": bad number '" + token +
                                 "'");
            row.values.push_back(v);
            pos = comma + 1;
            if (comma == line.size()) break;
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

} // namespace ncrhok
