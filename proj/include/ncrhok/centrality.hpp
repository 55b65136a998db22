#pragma once

#include <vector>

#include "ncrhok/graph.hpp"

namespace ncrhok {

/**
 * Unnormalized directed betweenness centrality: for every node v, the sum over
 * ordered pairs (s, t), s != t != v, of the fraction of shortest s->t paths
 * passing through v. Dead nodes (when a mask is given) score 0 and are invisible
 * to the path counts.
 */
std::vector<double> brandes_bc(const DirectedGraph& g);
std::vector<double> brandes_bc(const DirectedGraph& g, const NodeMask& mask);

/**
 * Reference betweenness via all-pairs path counting (sigma_sv * sigma_vt /
 * sigma_st over distance-consistent triples). O(n^3); guarded to n <= 128.
 */
std::vector<double> naive_bc(const DirectedGraph& g);

/** Min-max normalization to [0, 1]; a constant vector maps to all zeros. */
std::vector<double> minmax_normalized(const std::vector<double>& v);

} // namespace ncrhok
