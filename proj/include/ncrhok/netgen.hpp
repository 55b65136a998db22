#pragma once

#include <cstdint>
#include <string>

#include "ncrhok/graph.hpp"
#include "ncrhok/rng.hpp"

namespace ncrhok {

enum class Topology { Er, Sf, Qsn, Sw };

Topology topology_from_string(const std::string& s);
std::string to_string(Topology t);

/**
 * Recipe for one random graph. Every generator produces a simple digraph with
 * exactly M = round(n * k_avg) edges; identical specs produce identical graphs.
 */
struct GenSpec {
    Topology topology = Topology::Er;
    int n = 0;
    double k_avg = 0.0;
    std::uint64_t seed = 0;
    double sf_beta = 0.999; ///< scale-free weight exponent (tail exponent 1 + 1/beta)
    double sf_theta = 1.0;  ///< scale-free id offset
    int qsn_rq = 1;         ///< snapback layer stride

    std::string to_manifest() const;
    static GenSpec from_manifest(const std::string& line);
};

DirectedGraph generate(const GenSpec& spec);

/** Uniform simple digraph with exactly round(n * k_avg) distinct edges. */
DirectedGraph gen_er(int n, double k_avg, Rng& rng);

/**
 * Scale-free digraph: both endpoints of every edge drawn independently with
 * probability proportional to (i + theta)^(-beta) over ids i = 1..n; collisions
 * and duplicate edges are re-drawn until the edge budget is met.
 */
DirectedGraph gen_sf(int n, double k_avg, Rng& rng, double beta = 0.999, double theta = 1.0);

/**
 * q-snapback digraph: forward backbone chain i -> i+1 plus each candidate
 * snapback edge i -> i - l*r_q kept with probability q, where q is solved so
 * the expected edge count equals the budget; the realised set is then trimmed
 * or padded with uniformly random snapback-eligible edges to hit it exactly.
 */
DirectedGraph gen_qsn(int n, double k_avg, Rng& rng, int r_q = 1);

/**
 * Small-world digraph: directed ring with edges i -> i+1 and i -> i+2 (mod n),
 * then uniformly random simple edges added (or ring edges removed) to reach
 * the edge budget. Requires n >= 5.
 */
DirectedGraph gen_sw(int n, double k_avg, Rng& rng);

} // namespace ncrhok
