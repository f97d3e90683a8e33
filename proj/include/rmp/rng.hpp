#pragma once

#include <cmath>
#include <cstdint>

namespace rmp {

inline uint64_t splitmix64(uint64_t& state) {
    uint64_t z = (state += 0x9E3779B97F4A7C15ull);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

/// Seed for an independent stream: sampling is pure in (seed, index).
inline uint64_t derive_seed(uint64_t seed, uint64_t index) {
    uint64_t s = seed ^ (0xD1B54A32D192ED03ull * (index + 1));
    return splitmix64(s);
}

/// Minimal deterministic generator; identical output on every platform.
struct Rng {
    uint64_t state;
    bool has_spare = false;
    double spare = 0.0;

    explicit Rng(uint64_t seed) : state(seed) {
        // warm up so trivially related seeds decorrelate
        splitmix64(state);
        splitmix64(state);
    }

    uint64_t u64() { return splitmix64(state); }

    /// Uniform in (0,1).
    double unit() { return ((u64() >> 11) + 0.5) * 0x1.0p-53; }

    /// Standard normal via Box-Muller.
    double gauss() {
        if (has_spare) { has_spare = false; return spare; }
        double u = unit(), v = unit();
        double r = std::sqrt(-2.0 * std::log(u));
        double a = 6.283185307179586476925286766559 * v;
        spare = r * std::sin(a);
        has_spare = true;
        return r * std::cos(a);
    }
};

} // namespace rmp
