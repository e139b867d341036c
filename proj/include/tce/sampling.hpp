#pragma once

#include <cstdint>

#include "numeric.hpp"

namespace tce {

// SplitMix64: small, fast, and identical on every platform, which keeps
// seeded runs byte-reproducible.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next() {
    std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  // Uniform in [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  Real uniform(const Real& lo, const Real& hi) { return lo + (hi - lo) * Real(uniform()); }

  // Uniform in [0.05, 0.95]: keeps samples 5% away from region edges.
  Real interior() { return Real(0.05 + 0.9 * uniform()); }

 private:
  std::uint64_t state_;
};

}  // namespace tce
