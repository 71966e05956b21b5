#pragma once

#include <cstdint>
#include <vector>

namespace conetorsion {

enum class ConeKind : std::uint8_t { Planar2D, Axisym3D };

// A cone about the origin: planar wedge of aperture alpha, or the rotationally
// symmetric cone of half-angle beta about the positive z-axis. Axisymmetric
// domains are handled in the meridian half-plane (r, z) with the 2*pi*r
// Jacobian weight.
struct ConeSpec {
  ConeKind kind = ConeKind::Planar2D;
  double aperture = 0.0;  // alpha (planar) or beta (axisymmetric half-angle)

  static ConeSpec planar(double alpha) { return {ConeKind::Planar2D, alpha}; }
  static ConeSpec axisym(double beta) { return {ConeKind::Axisym3D, beta}; }

  int dimension() const { return kind == ConeKind::Planar2D ? 2 : 3; }
  bool planar2d() const { return kind == ConeKind::Planar2D; }

  // |S_{omega,1}|: measure of the unit spherical sector of this cone.
  double omega_measure() const;

  // throws std::invalid_argument on aperture out of range
  void validate() const;
};

// Sector-like domain given by a strictly positive radial profile rho(theta)
// sampled on the uniform closed grid theta_i = i*aperture/n_theta,
// i = 0..n_theta. No periodicity: the profile ends on the two wall rays
// (planar) or on the axis and the wall (axisymmetric meridian).
struct PolarGraph {
  ConeSpec cone;
  std::vector<double> rho;

  int n_theta() const { return static_cast<int>(rho.size()) - 1; }
  double dtheta() const { return cone.aperture / n_theta(); }
  double theta(int i) const { return cone.aperture * i / n_theta(); }

  double min_rho() const;
  double max_rho() const;
  bool constant_profile() const;  // all samples bitwise equal

  PolarGraph scaled(double t) const;

  // throws std::invalid_argument on invariant violation
  void validate() const;
};

// rho'(theta) on the grid: centered differences inside, second-order
// one-sided at the endpoint rays.
std::vector<double> profile_derivative(const PolarGraph& g);

// Composite Simpson over the uniform profile grid (3/8 tail when the
// interval count is odd). O(n^-4) for smooth integrands.
double simpson_on_grid(const std::vector<double>& f, double dx);

}  // namespace conetorsion
