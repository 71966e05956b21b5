#pragma once

#include <memory>
#include <vector>

#include "conetorsion/fem.hpp"

namespace conetorsion {

// Decreasing rearrangement u#(s) stored as a piecewise-linear function of
// measure s on [0, total_measure].
struct RearrangedProfile {
  std::vector<double> breakpoints;  // strictly increasing, 0 .. total_measure
  std::vector<double> values;       // nonincreasing, values[0] = max |u|
  double total_measure = 0.0;

  double eval(double s) const;  // clamped piecewise-linear evaluation
};

// mu(t) = |{ |u| > t }|, one value per t. Each triangle contributes the exact
// measure of the sub-region where the linear interpolant exceeds t (polygon
// clipping, weighted for axisymmetric meshes).
std::vector<double> distribution_function(const FemField& u, const std::vector<double>& t_grid);
std::vector<double> distribution_function_serial(const FemField& u, const std::vector<double>& t_grid);

// u#(s) = inf{ t >= 0 : mu(t) < s } from mu sampled on n_bins uniform levels;
// exact for P1 fields up to level-grid resolution. n_bins >= 16.
RearrangedProfile decreasing_rearrangement(const FemField& u, int n_bins = 4096);

// u*_omega(x) = u#(omega_N |x|^N) on the equal-volume sector's mesh.
// Throws VolumeMismatch when the target's graph volume differs from the
// source's by more than 1e-8 relative.
FemField omega_symmetrize(const FemField& u, std::shared_ptr<const SectorMesh> target_mesh,
                          int n_bins = 4096);

// int_Omega |grad u|^p - int_{S_omega(Omega)} |grad u*_omega|^p. The
// symmetrized integral is evaluated in measure space from u#:
//   int |(u*)'(r)|^p dP(r) = int |u#'(s)|^p (N omega_N r(s)^{N-1})^p ds,
// exact per bin for the piecewise-linear u#.
double polya_szego_gap(const FemField& u, double p, int n_bins = 4096);

// int_{S_omega(Omega)} |u*_omega|^p computed in measure space: int |u#|^p ds.
double rearranged_p_integral(const RearrangedProfile& r, double p);

// Symmetrized Dirichlet p-energy from the rearrangement (the subtrahend of
// polya_szego_gap), exposed for reports.
double symmetrized_gradient_p_norm(const RearrangedProfile& r, const ConeSpec& cone, double p);

}  // namespace conetorsion
