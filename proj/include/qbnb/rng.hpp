#pragma once

#include <cstdint>

namespace qbnb {

// Deterministic 64-bit generator used everywhere randomized inputs appear
// (seeded problem families, randomized property tests). The state advances by
// a fixed additive constant and the output is finalized with two
// multiply-xorshift mixing rounds (splitmix64 constants), so the stream is
// identical on every platform. Not suitable for cryptography, entirely
// suitable for reproducible experiments.
class SplitMix64 {
  public:
    explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next() {
        state_ += 0x9E3779B97F4A7C15ull;
        std::uint64_t z = state_;
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
        return z ^ (z >> 31);
    }

    // Uniform in [0, 1) with 53 random mantissa bits.
    double uniform01() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

    // Uniform in [lo, hi).
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

    // Uniform integer in [0, n).
    std::uint64_t below(std::uint64_t n) { return next() % n; }

  private:
    std::uint64_t state_;
};

}  // namespace qbnb
