#include "conetorsion/rng.hpp"

#include <cmath>
#include <numbers>

namespace conetorsion {

PolarGraph random_profile(const ConeSpec& cone, int n_theta, std::uint64_t seed,
                          double base_radius, int k_max, double amp) {
  cone.validate();
  Rng rng(seed);
  std::vector<double> coeff(k_max);
  for (int k = 0; k < k_max; ++k)
    coeff[k] = rng.uniform(-1.0, 1.0) * amp / ((k + 1.0) * (k + 1.0));
  PolarGraph g;
  g.cone = cone;
  g.rho.resize(n_theta + 1);
  for (int i = 0; i <= n_theta; ++i) {
    const double th = cone.aperture * i / n_theta;
    double s = 1.0;
    for (int k = 0; k < k_max; ++k)
      s += coeff[k] * std::cos((k + 1) * std::numbers::pi * th / cone.aperture);
    g.rho[i] = base_radius * s;
  }
  g.validate();
  return g;
}

}  // namespace conetorsion
