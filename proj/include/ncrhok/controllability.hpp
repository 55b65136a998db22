#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "ncrhok/graph.hpp"

namespace ncrhok {

/**
 * Controllability curve of one attack run: values[i-1] = N_D(i) / (N - i) for
 * i = 1..N-1 removals. Every entry lies in (0, 1]; the last is exactly 1.
 */
struct RobustnessCurve {
    std::vector<double> values;
};

enum class AttackKind {
    Random,      ///< uniformly random surviving node
    Degree,      ///< maximum total degree, ties to the lowest id
    Betweenness, ///< maximum betweenness, ties to the lowest id
};

AttackKind attack_from_string(const std::string& s);
std::string to_string(AttackKind k);

/** Centrality callback for betweenness-targeted attacks (e.g. a learned predictor). */
using BcFn = std::function<std::vector<double>(const DirectedGraph&, const NodeMask&)>;

struct AttackSpec {
    AttackKind kind = AttackKind::Random;
    /** Re-rank targets on the damaged graph each step; false ranks once upfront. */
    bool recompute = true;
    std::uint64_t seed = 0;
    /** Random attacks only: average the curve over this many independent orders. */
    int repeats = 1;
    /** Betweenness source; empty means exact betweenness. */
    BcFn bc_fn;
};

/** Maximum bipartite matching size of the out/in split (alive edges only). */
std::size_t max_matching_size(const DirectedGraph& g);
std::size_t max_matching_size(const DirectedGraph& g, const NodeMask& mask);

/** Minimum driver nodes of a directed network: max(N - |matching|, 1). */
int min_driver_nodes(const DirectedGraph& g);
int min_driver_nodes(const DirectedGraph& g, const NodeMask& mask);

/**
 * Minimum driver nodes of an undirected network (symmetric digraph):
 * max(N - rank(A), 1) with the adjacency rank computed exactly over the
 * rationals. Throws InputError if the graph is not symmetric.
 */
int min_driver_nodes_undirected(const DirectedGraph& g);

/** Exact rank of the (symmetric) 0/1 adjacency matrix over the rationals. */
int adjacency_rank_exact(const DirectedGraph& g);

/** Run one node-removal attack to exhaustion and record the curve. */
RobustnessCurve simulate_attack(const DirectedGraph& g, const AttackSpec& spec);

/**
 * Per-step comparison of predicted against true curves over a test set:
 * er_curve[j] is the mean absolute error at step j+1 across graphs and
 * sigma_curve[j] the population standard deviation of those absolute errors;
 * er_mean / sigma_mean average them over the steps.
 */
struct CurveBundle {
    std::vector<std::vector<double>> true_curves;
    std::vector<std::vector<double>> pred_curves;
    std::vector<double> er_curve;
    std::vector<double> sigma_curve;
    double er_mean = 0.0;
    double sigma_mean = 0.0;
};

CurveBundle curve_metrics(std::vector<std::vector<double>> true_curves,
                          std::vector<std::vector<double>> pred_curves);

/** One row of a curve CSV: an optional metadata comment plus the values. */
struct CurveRow {
    std::string meta; ///< written as "# <meta>" above the data row when non-empty
    std::vector<double> values;
};

void save_curves_csv(const std::string& path, const std::vector<CurveRow>& rows);
std::vector<CurveRow> load_curves_csv(const std::string& path);

} // namespace ncrhok
