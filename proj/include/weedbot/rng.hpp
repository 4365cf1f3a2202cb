#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace weedbot {

/// SplitMix64 finalizer; used to derive independent sub-seeds from a base seed.
constexpr std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream)
{
    std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (stream + 1);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

using Rng = std::mt19937_64;

/// Uniform double in [lo, hi) built directly from the engine bits so the
/// sequence does not depend on the standard library's distribution code.
inline double uniform(Rng& rng, double lo, double hi)
{
    const double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
    return lo + (hi - lo) * u;
}

/// Standard normal via Box-Muller on engine bits.
inline double standard_normal(Rng& rng)
{
    double u1 = 0.0;
    do {
        u1 = uniform(rng, 0.0, 1.0);
    } while (u1 <= 0.0);
    const double u2 = uniform(rng, 0.0, 1.0);
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * 3.14159265358979323846 * u2);
}

}  // namespace weedbot
