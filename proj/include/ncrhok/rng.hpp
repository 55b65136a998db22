#pragma once

#include <cstdint>
#include <vector>

namespace ncrhok {

/**
 * Deterministic 64-bit generator (xoshiro256**) with splitmix64 seeding.
 *
 * All randomness in the toolkit flows through this class, including the integer
 * and floating-point draws below, which are implemented here rather than with
 * <random> distributions so that a given seed produces bit-identical streams on
 * every platform and standard library.
 */
class Rng {
public:
    explicit Rng(std::uint64_t seed) {
        // splitmix64 expansion of the seed into the four lanes of state.
        std::uint64_t x = seed;
        for (auto& lane : s_) {
            x += 0x9e3779b97f4a7c15ULL;
            std::uint64_t z = x;
            z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
            z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
            lane = z ^ (z >> 31);
        }
    }

    /** Next raw 64-bit word. */
    std::uint64_t next_u64() {
        const std::uint64_t result = rotl(s_[1] * 5, 7) * 9;
        const std::uint64_t t = s_[1] << 17;
        s_[2] ^= s_[0];
        s_[3] ^= s_[1];
        s_[1] ^= s_[2];
        s_[0] ^= s_[3];
        s_[2] ^= t;
        s_[3] = rotl(s_[3], 45);
        return result;
    }

    /** Uniform integer in [0, bound) via rejection sampling; bound must be > 0. */
    std::uint64_t next_below(std::uint64_t bound) {
        // Reject the tail of the 2^64 range that would bias small residues.
        const std::uint64_t threshold = (0 - bound) % bound;
        for (;;) {
            const std::uint64_t r = next_u64();
            if (r >= threshold) return r % bound;
        }
    }

    /** Uniform double in [0, 1) with 53 random bits. */
    double next_double() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    /** Fisher-Yates shuffle (back-to-front, draw order fixed). */
    template <typename T>
    void shuffle(std::vector<T>& v) {
        for (std::size_t i = v.size(); i > 1; --i) {
            const std::size_t j = static_cast<std::size_t>(next_below(i));
            std::swap(v[i - 1], v[j]);
        }
    }

    /**
     * Derive an independent stream for sub-task `index` (graph i of a batch,
     * repeat r of an attack, ...). Streams from distinct indices never share
     * state with the parent or each other in any way that matters here.
     */
    static Rng derive(std::uint64_t seed, std::uint64_t index) {
        std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (index + 1);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return Rng(z ^ (z >> 31));
    }

private:
    static std::uint64_t rotl(std::uint64_t x, int k) {
        return (x << k) | (x >> (64 - k));
    }

    std::uint64_t s_[4];
};

} // namespace ncrhok
