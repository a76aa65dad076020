#pragma once

#include <cstdint>
#include <random>

namespace imsp {

// All randomness flows through explicitly seeded mt19937_64 streams; the
// uniform mapping below is hand-rolled so outputs are identical across
// standard libraries.

inline std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

/// Derive an independent stream seed from (seed, a, b).
inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t a, std::uint64_t b = 0) {
    std::uint64_t s = seed;
    std::uint64_t h = splitmix64(s);
    s ^= a + 0x9e3779b97f4a7c15ULL;
    h ^= splitmix64(s);
    s ^= b + 0xc2b2ae3d27d4eb4fULL;
    h ^= splitmix64(s);
    return h;
}

/// U[0,1) with 53 random bits.
inline double uniform01(std::mt19937_64& gen) {
    return static_cast<double>(gen() >> 11) * (1.0 / 9007199254740992.0);
}

/// U[-1,1).
inline double uniform_pm1(std::mt19937_64& gen) { return 2.0 * uniform01(gen) - 1.0; }

/// U[lo,hi).
inline double uniform_in(std::mt19937_64& gen, double lo, double hi) {
    return lo + (hi - lo) * uniform01(gen);
}

}  // namespace imsp
