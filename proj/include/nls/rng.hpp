#pragma once

#include <cmath>
#include <cstdint>

namespace nls {

// splitmix64: tiny, stateless-friendly, identical on every platform. We avoid
// std::uniform_real_distribution / std::normal_distribution because their
// output is implementation-defined, which would break byte-identical reruns.
struct Rng {
    std::uint64_t state;

    explicit Rng(std::uint64_t seed) : state(seed) {}

    std::uint64_t next_u64() {
        std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    /// Uniform in [0, 1).
    double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    double uniform(double a, double b) { return a + (b - a) * uniform(); }

    /// Standard normal via Box-Muller (no cached spare; deterministic).
    double normal() {
        double u1 = uniform();
        while (u1 <= 0.0) u1 = uniform();
        const double u2 = uniform();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586476925287 * u2);
    }

    /// Derive an independent stream for a named purpose.
    static std::uint64_t mix(std::uint64_t seed, std::uint64_t tag) {
        Rng r(seed ^ (0x6a09e667f3bcc909ULL + tag * 0x9e3779b97f4a7c15ULL));
        return r.next_u64();
    }
};

} // namespace nls
