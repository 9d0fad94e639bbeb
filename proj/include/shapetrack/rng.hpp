#pragma once

#include <cstdint>
#include <random>
#include <span>

namespace shapetrack {

// Deterministic random helpers. std::mt19937_64 output is fully specified by
// the standard; the distributions in <random> are not, so they are hand-rolled
// here to keep results reproducible across library versions.

/// splitmix64 mix, used to derive independent streams from (seed, stream id).
inline uint64_t mix_seed(uint64_t seed, uint64_t stream) {
    uint64_t z = seed + 0x9E3779B97F4A7C15ull * (stream + 1);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

/// Unbiased integer in [0, n) via rejection sampling.
inline uint64_t rng_below(std::mt19937_64& rng, uint64_t n) {
    if (n <= 1) return 0;
    const uint64_t limit = UINT64_MAX - UINT64_MAX % n;
    uint64_t v;
    do {
        v = rng();
    } while (v >= limit);
    return v % n;
}

/// Uniform double in [0, 1) with 53 random bits.
inline double rng_uniform01(std::mt19937_64& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

/// Standard normal via Box-Muller (uses two uniforms, returns one variate).
inline double rng_normal(std::mt19937_64& rng) {
    double u1 = rng_uniform01(rng);
    const double u2 = rng_uniform01(rng);
    if (u1 <= 0.0) u1 = 0x1.0p-53;
    const double r = std::sqrt(-2.0 * std::log(u1));
    return r * std::cos(2.0 * 3.14159265358979323846 * u2);
}

/// In-place Fisher-Yates shuffle.
template <typename T>
void rng_shuffle(std::span<T> items, std::mt19937_64& rng) {
    for (size_t i = items.size(); i > 1; --i) {
        const size_t j = static_cast<size_t>(rng_below(rng, i));
        std::swap(items[i - 1], items[j]);
    }
}

}  // namespace shapetrack
