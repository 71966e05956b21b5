#pragma once

#include <cstdint>
#include <random>

#include "conetorsion/cone.hpp"

namespace conetorsion {

// Deterministic RNG. mt19937_64 has a standard-pinned output sequence; the
// double extraction below avoids std::uniform_real_distribution, whose
// stream is implementation-defined. Byte-identical outputs for a fixed seed
// are part of the CLI contract.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : eng_(seed) {}

  // uniform in [0, 1)
  double uniform() {
    return static_cast<double>(eng_() >> 11) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  std::uint64_t next_u64() { return eng_(); }

 private:
  std::mt19937_64 eng_;
};

// Smooth strictly positive random profile rho = R*(1 + sum a_k cos(k pi theta / aperture)),
// |a_k| <= amp/k^2. With amp <= 0.15 the sum is bounded by 0.15*pi^2/6 < 1,
// so positivity holds for every seed.
PolarGraph random_profile(const ConeSpec& cone, int n_theta, std::uint64_t seed,
                          double base_radius = 1.0, int k_max = 6, double amp = 0.15);

}  // namespace conetorsion
