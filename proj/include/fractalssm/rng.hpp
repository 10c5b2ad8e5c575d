// Deterministic random source. All randomness in the library flows through
// this wrapper so runs are reproducible bit-for-bit from a single uint64 seed.
//
// Engine: std::mt19937_64 (Mersenne Twister, 64-bit variant). The raw engine
// is standardized, but the standard *distributions* are not (their output may
// differ across standard libraries), so the distribution maps below are
// hand-rolled and platform-stable:
//   uniform double: top 53 bits of one draw, scaled by 2^-53
//   normal: Box-Muller on two uniform draws, one value per call (no caching)
//   bounded int: scaling (bias < 2^-53, irrelevant at these ranges)
#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace fractalssm {

class Rng {
  public:
    explicit Rng(std::uint64_t seed) : gen_(seed) {}

    std::uint64_t bits() { return gen_(); }

    // Uniform in [0, 1).
    double uniform() { return static_cast<double>(bits() >> 11) * 0x1.0p-53; }

    // Uniform in [lo, hi).
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    // Standard normal.
    double normal() {
        double u1 = uniform();
        while (u1 <= 0.0) u1 = uniform();
        const double u2 = uniform();
        const double two_pi = 6.283185307179586476925286766559;
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(two_pi * u2);
    }

    // Uniform integer in [0, n), n > 0.
    std::uint64_t below(std::uint64_t n) {
        return static_cast<std::uint64_t>(uniform() * static_cast<double>(n)) % n;
    }

  private:
    std::mt19937_64 gen_;
};

// Splitmix64-style scrambler for deriving per-purpose seeds from a master
// seed; keeps component draw sequences independent of one another.
inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream) {
    std::uint64_t z = master ^ (stream + 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

}  // namespace fractalssm
