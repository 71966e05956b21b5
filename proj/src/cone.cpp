#include "conetorsion/cone.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace conetorsion {

double ConeSpec::omega_measure() const {
  if (kind == ConeKind::Planar2D) return aperture / 2.0;
  return 2.0 * std::numbers::pi * (1.0 - std::cos(aperture)) / 3.0;
}

void ConeSpec::validate() const {
  if (!std::isfinite(aperture)) throw std::invalid_argument("cone aperture must be finite");
  if (kind == ConeKind::Planar2D) {
    if (!(aperture > 0.0 && aperture < 2.0 * std::numbers::pi))
      throw std::invalid_argument("planar aperture must lie in (0, 2*pi)");
  } else {
    if (!(aperture > 0.0 && aperture < std::numbers::pi / 2.0))
      throw std::invalid_argument("axisymmetric half-angle must lie in (0, pi/2)");
  }
  if (!(omega_measure() > 0.0)) throw std::invalid_argument("cone has empty opening");
}

double PolarGraph::min_rho() const {
  return *std::min_element(rho.begin(), rho.end());
}

double PolarGraph::max_rho() const {
  return *std::max_element(rho.begin(), rho.end());
}

bool PolarGraph::constant_profile() const {
  for (double v : rho)
    if (v != rho.front()) return false;
  return true;
}

PolarGraph PolarGraph::scaled(double t) const {
  PolarGraph out = *this;
  for (double& v : out.rho) v *= t;
  return out;
}

void PolarGraph::validate() const {
  cone.validate();
  if (rho.size() < 9) throw std::invalid_argument("polar graph needs n_theta >= 8");
  for (double v : rho)
    if (!(v > 0.0) || !std::isfinite(v))
      throw std::invalid_argument("polar graph profile must be strictly positive");
}

std::vector<double> profile_derivative(const PolarGraph& g) {
  const int n = g.n_theta();
  const double dt = g.dtheta();
  const auto& r = g.rho;
  std::vector<double> d(r.size());
  d[0] = (-3.0 * r[0] + 4.0 * r[1] - r[2]) / (2.0 * dt);
  for (int i = 1; i < n; ++i) d[i] = (r[i + 1] - r[i - 1]) / (2.0 * dt);
  d[n] = (3.0 * r[n] - 4.0 * r[n - 1] + r[n - 2]) / (2.0 * dt);
  return d;
}

double simpson_on_grid(const std::vector<double>& f, double dx) {
  const int n = static_cast<int>(f.size()) - 1;  // interval count
  if (n < 1) return 0.0;
  if (n == 1) return dx * 0.5 * (f[0] + f[1]);
  double s = 0.0;
  int m = n;
  // odd interval count: 3/8 rule on the last three intervals
  bool tail38 = (n % 2 != 0);
  if (tail38) m = n - 3;
  for (int i = 0; i + 2 <= m; i += 2) s += dx / 3.0 * (f[i] + 4.0 * f[i + 1] + f[i + 2]);
  if (tail38) {
    if (m < 0) {  // n == 1 handled above; n == 3 gives m == 0
      m = 0;
    }
    const int b = m;
    s += 3.0 * dx / 8.0 * (f[b] + 3.0 * f[b + 1] + 3.0 * f[b + 2] + f[b + 3]);
  }
  return s;
}

}  // namespace conetorsion
