#pragma once

#include <cmath>
#include <cstdint>

namespace lhv {

// Deterministic, platform-independent pseudo-random primitives. All randomness
// in the library flows through these so that runs are reproducible from a
// single seed across compilers and machines.

inline uint64_t splitmix64(uint64_t& state) {
    uint64_t z = (state += 0x9e3779b97f4a7c15ull);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}

// Stateless mix of a base seed with a stream index (iteration, restart, ...).
inline uint64_t derive_seed(uint64_t base, uint64_t stream) {
    uint64_t s = base ^ (0x9e3779b97f4a7c15ull * (stream + 1));
    return splitmix64(s);
}

// Uniform double in [0, 1) from the top 53 bits.
inline double uniform01(uint64_t& state) {
    return static_cast<double>(splitmix64(state) >> 11) * 0x1.0p-53;
}

// Standard normal via Box-Muller (uses two uniforms, discards the pair phase).
inline double gaussian(uint64_t& state) {
    double u1 = uniform01(state);
    double u2 = uniform01(state);
    while (u1 <= 0.0) u1 = uniform01(state);
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586476925287 * u2);
}

} // namespace lhv
