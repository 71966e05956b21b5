#pragma once

#include "conetorsion/cone.hpp"

namespace conetorsion {

// Closed-form spherical sector quantities. Constant profiles route through
// these so that sectors evaluate exactly, not just to quadrature accuracy.
double sector_volume(const ConeSpec& cone, double radius);
double sector_perimeter(const ConeSpec& cone, double radius);

// |Omega| by composite Simpson on the rho grid:
//   planar      1/2 int rho^2 dtheta
//   axisym      (2 pi/3) int rho^3 sin(theta) dtheta
double volume(const PolarGraph& g);

// Measure of Gamma only (the cone-wall part Gamma_1 is excluded):
//   planar      int sqrt(rho^2 + rho'^2) dtheta
//   axisym      2 pi int rho sin(theta) sqrt(rho^2 + rho'^2) dtheta
double relative_perimeter(const PolarGraph& g);

// P_omega(Omega) - N * omega_N^{1/N} * |Omega|^{(N-1)/N}. Zero exactly for
// sectors (closed-form path), nonnegative in isoperimetric cones.
double isoperimetric_gap(const PolarGraph& g);

// The spherical sector S_omega(Omega) with the same measure, as a constant
// profile on the same grid. Constant inputs are returned unchanged.
PolarGraph sector_of_same_volume(const PolarGraph& g);

PolarGraph sector_graph(const ConeSpec& cone, double radius, int n_theta);

}  // namespace conetorsion
