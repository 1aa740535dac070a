#pragma once

#include <cstdint>

namespace stakepool {

// SplitMix64 (Steele/Lea/Vigna; the mixer behind Java's SplittableRandom).
// Chosen because replications need cheap independent streams keyed by
// (seed, replication index) with results that do not depend on evaluation
// order. Output sequences are fully specified here, so runs are bit-identical
// across platforms for a fixed seed.
class SplitMix64 {
public:
    explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next() {
        std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ull);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
        return z ^ (z >> 31);
    }

    // Uniform double in [0,1) with 53 random bits.
    double next_double() {
        return static_cast<double>(next() >> 11) * 0x1.0p-53;
    }

    // Uniform integer in [0, n), n >= 1. Rejection on a power-of-two mask,
    // so the result is exact (no modulo bias) and deterministic.
    std::uint64_t next_below(std::uint64_t n) {
        if (n <= 1) return 0;
        std::uint64_t mask = ~0ull >> __builtin_clzll((n - 1) | 1);
        std::uint64_t v;
        do {
            v = next() & mask;
        } while (v >= n);
        return v;
    }

private:
    std::uint64_t state_;
};

// Finalizer used to derive stream seeds; same avalanche function as above.
inline std::uint64_t mix64(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}

// Stream for one replication: decorrelates (seed, index) pairs so that
// replication i is the same whether it runs first, last, or in parallel.
inline SplitMix64 replication_stream(std::uint64_t seed, std::uint64_t index) {
    return SplitMix64(mix64(seed + 0x9e3779b97f4a7c15ull * (index + 1)));
}

} // namespace stakepool
