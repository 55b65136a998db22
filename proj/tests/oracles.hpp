#pragma once

// Independent reference implementations used to pin expected values in tests.
// These deliberately avoid the algorithms used by the library: matching is an
// exhaustive bitmask DP rather than augmenting paths, and the float rank uses
// a Jacobi eigensolver rather than exact elimination.

#include <cmath>
#include <cstdint>
#include <vector>

#include "ncrhok/graph.hpp"

namespace oracles {

/** Exhaustive maximum bipartite matching of the out/in split (n <= ~16). */
inline int bf_matching(const ncrhok::DirectedGraph& g, const ncrhok::NodeMask* mask = nullptr) {
    const int n = g.num_nodes();
    auto alive = [&](ncrhok::NodeId v) { return mask == nullptr || mask->alive(v); };
    std::vector<int> memo(static_cast<std::size_t>(n) << n, -1);

    auto rec = [&](auto&& self, int u, std::uint32_t used) -> int {
        if (u == n) return 0;
        int& slot = memo[(static_cast<std::size_t>(u) << n) | used];
        if (slot >= 0) return slot;
        int best = self(self, u + 1, used); // leave u unmatched
        if (alive(u)) {
            for (ncrhok::NodeId v : g.out_neighbors(u)) {
                if (!alive(v) || (used >> v) & 1u) continue;
                best = std::max(best, 1 + self(self, u + 1, used | (1u << v)));
            }
        }
        slot = best;
        return best;
    };
    return rec(rec, 0, 0);
}

inline int bf_driver_nodes(const ncrhok::DirectedGraph& g, const ncrhok::NodeMask* mask = nullptr) {
    const int aliveCount = mask ? mask->alive_count() : g.num_nodes();
    if (aliveCount == 0) return 0;
    return std::max(aliveCount - bf_matching(g, mask), 1);
}

/** Eigenvalue rank of a symmetric matrix via cyclic Jacobi rotations. */
inline int jacobi_rank(std::vector<std::vector<double>> a, double tol = 1e-8) {
    const std::size_t n = a.size();
    for (int sweep = 0; sweep < 100; ++sweep) {
        double off = 0.0;
        for (std::size_t p = 0; p < n; ++p)
            for (std::size_t q = p + 1; q < n; ++q) off += a[p][q] * a[p][q];
        if (off < 1e-24) break;
        for (std::size_t p = 0; p < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                if (std::abs(a[p][q]) < 1e-18) continue;
                const double theta = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
                const double t = (theta >= 0 ? 1.0 : -1.0) /
                                 (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;
                for (std::size_t k = 0; k < n; ++k) {
                    const double akp = a[k][p], akq = a[k][q];
                    a[k][p] = c * akp - s * akq;
                    a[k][q] = s * akp + c * akq;
                }
                for (std::size_t k = 0; k < n; ++k) {
                    const double apk = a[p][k], aqk = a[q][k];
                    a[p][k] = c * apk - s * aqk;
                    a[q][k] = s * apk + c * aqk;
                }
            }
        }
    }
    int rank = 0;
    for (std::size_t i = 0; i < n; ++i)
        if (std::abs(a[i][i]) > tol) ++rank;
    return rank;
}

inline int jacobi_adjacency_rank(const ncrhok::DirectedGraph& g) {
    const auto n = static_cast<std::size_t>(g.num_nodes());
    std::vector<std::vector<double>> a(n, std::vector<double>(n, 0.0));
    for (auto [u, v] : g.edges()) a[static_cast<std::size_t>(u)][static_cast<std::size_t>(v)] = 1.0;
    return jacobi_rank(std::move(a));
}

} // namespace oracles
