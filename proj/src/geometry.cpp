#include "conetorsion/geometry.hpp"

#include <cmath>
#include <numbers>

namespace conetorsion {

namespace {
constexpr double kPi = std::numbers::pi;
}

double sector_volume(const ConeSpec& cone, double radius) {
  if (cone.planar2d()) return 0.5 * cone.aperture * radius * radius;
  return 2.0 * kPi / 3.0 * (1.0 - std::cos(cone.aperture)) * radius * radius * radius;
}

double sector_perimeter(const ConeSpec& cone, double radius) {
  if (cone.planar2d()) return cone.aperture * radius;
  return 2.0 * kPi * (1.0 - std::cos(cone.aperture)) * radius * radius;
}

double volume(const PolarGraph& g) {
  g.validate();
  if (g.constant_profile()) return sector_volume(g.cone, g.rho.front());
  const int n = g.n_theta();
  std::vector<double> f(n + 1);
  if (g.cone.planar2d()) {
    for (int i = 0; i <= n; ++i) f[i] = 0.5 * g.rho[i] * g.rho[i];
  } else {
    for (int i = 0; i <= n; ++i) {
      const double r = g.rho[i];
      f[i] = 2.0 * kPi / 3.0 * r * r * r * std::sin(g.theta(i));
    }
  }
  return simpson_on_grid(f, g.dtheta());
}

double relative_perimeter(const PolarGraph& g) {
  g.validate();
  if (g.constant_profile()) return sector_perimeter(g.cone, g.rho.front());
  const int n = g.n_theta();
  const std::vector<double> dr = profile_derivative(g);
  std::vector<double> f(n + 1);
  for (int i = 0; i <= n; ++i) {
    const double arc = std::sqrt(g.rho[i] * g.rho[i] + dr[i] * dr[i]);
    f[i] = g.cone.planar2d() ? arc : 2.0 * kPi * g.rho[i] * std::sin(g.theta(i)) * arc;
  }
  return simpson_on_grid(f, g.dtheta());
}

double isoperimetric_gap(const PolarGraph& g) {
  const double v = volume(g);
  const double p = relative_perimeter(g);
  const int n_dim = g.cone.dimension();
  const double wn = g.cone.omega_measure();
  return p - n_dim * std::pow(wn, 1.0 / n_dim) * std::pow(v, double(n_dim - 1) / n_dim);
}

PolarGraph sector_of_same_volume(const PolarGraph& g) {
  g.validate();
  if (g.constant_profile()) return g;
  const double v = volume(g);
  const double radius = std::pow(v / g.cone.omega_measure(), 1.0 / g.cone.dimension());
  return sector_graph(g.cone, radius, g.n_theta());
}

PolarGraph sector_graph(const ConeSpec& cone, double radius, int n_theta) {
  PolarGraph g;
  g.cone = cone;
  g.rho.assign(n_theta + 1, radius);
  g.validate();
  return g;
}

}  // namespace conetorsion
