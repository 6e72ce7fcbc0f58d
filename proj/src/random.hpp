#pragma once

// Seeded variates built directly on the 64-bit Mersenne Twister so that a
// seed yields the same draws regardless of the standard library in use.

#include <cmath>
#include <cstdint>
#include <random>

namespace railems::detail {

class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    /// Uniform on [0, 1) with 53 random bits.
    double uniform01() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

    double exponential(double rate) { return -std::log1p(-uniform01()) / rate; }

    /// Triangular on [lo, hi] with the given mode, by inverse CDF.
    double triangular(double lo, double mode, double hi) {
        const double u = uniform01();
        if (hi <= lo) return lo;
        const double split = (mode - lo) / (hi - lo);
        if (u < split) return lo + std::sqrt(u * (hi - lo) * (mode - lo));
        return hi - std::sqrt((1.0 - u) * (hi - lo) * (hi - mode));
    }

private:
    std::mt19937_64 engine_;
};

}  // namespace railems::detail
