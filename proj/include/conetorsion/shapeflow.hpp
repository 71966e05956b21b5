#pragma once

#include <cstdint>
#include <vector>

#include "conetorsion/fem.hpp"
#include "conetorsion/geometry.hpp"
#include "conetorsion/mesh.hpp"

namespace conetorsion {

// Boundary deformation acting directly on the radial profile:
// rho_t = rho + t * graph_speed. The induced velocity field is radial, so it
// is tangent to the cone wall along the endpoint rays and vanishes at the
// vertex. The normal speed on Gamma is
//   <V, nu> = graph_speed * rho / sqrt(rho^2 + rho'^2).
struct DeformationField {
  std::vector<double> graph_speed;   // w on the rho grid
  std::vector<double> normal_speed;  // <V, nu> on the rho grid
  bool volume_preserving = false;
};

DeformationField graph_deformation(const std::vector<double>& w, const PolarGraph& g);

// Subtracts the Gamma-measure-weighted mean of the normal speed so that
// int_Gamma <V, nu> dsigma = 0 holds exactly in quadrature. Idempotent.
DeformationField project_volume_preserving(const std::vector<double>& w, const PolarGraph& g);

// dT/dt = -1/2 int_Gamma |grad u|^2 <V, nu> dsigma by facet quadrature with
// the recovered flux.
double shape_derivative(const PolarGraph& g, const DeformationField& d,
                        const MeshParams& mesh_params, double solver_tol = 1e-10);

// flux_deviation / flux_mean: scale-invariant residual of the overdetermined
// condition |grad u| = const on Gamma.
double overdetermined_residual(const PolarGraph& g, const MeshParams& mesh_params,
                               double solver_tol = 1e-10);

enum class FlowStatus : std::uint8_t { Converged, StepLimit, Stalled };

struct FlowStepRecord {
  int step = 0;
  double objective = 0.0;  // T_omega or P_omega
  double residual = 0.0;
  double volume = 0.0;
  double min_rho = 0.0;
  double max_rho = 0.0;
};

struct FlowState {
  PolarGraph graph;
  int step = 0;
  std::vector<FlowStepRecord> history;
  double volume_drift = 0.0;  // |V - V_target| after the final projection
  FlowStatus status = FlowStatus::StepLimit;

  std::vector<double> energy_history() const;
  std::vector<double> residual_history() const;
};

struct FlowParams {
  int max_steps = 80;
  double step_size = 0.5;  // trial step in profile units (direction is max-normalized)
  MeshParams mesh;
  double solver_tol = 1e-10;
  double residual_tol = 1e-3;   // stop when the overdetermined residual falls below
  double target_volume = 1.0;   // exact uniform rescale after every step
  double min_rho_factor = 1e-2; // MeshFailure when min rho drops below factor*max rho
  int max_halvings = 30;
  double armijo = 1e-4;
  // A stalled line search with residual above this multiple of residual_tol
  // is a StepFailure; below, the flow has simply hit the discrete floor.
  double stall_residual_factor = 50.0;
};

// Volume-constrained descent for the torsional energy. Descent direction from
// the boundary-integral gradient density, smoothed by one three-point
// averaging pass, volume-projected, with Armijo backtracking.
FlowState flow_torsion(const PolarGraph& g0, const FlowParams& params);

// Same loop for the relative perimeter; descent speed proportional to
// (curvature of Gamma minus its Gamma-average).
FlowState flow_perimeter(const PolarGraph& g0, const FlowParams& params);

// Curvature of the polar graph: planar curve curvature, or the meridian and
// parallel principal curvatures (axisymmetric). Used by the perimeter flow
// and curve_from_graph.
std::vector<double> graph_curvature_planar(const PolarGraph& g);
void graph_curvature_axisym(const PolarGraph& g, std::vector<double>& k_meridian,
                            std::vector<double>& k_parallel);

}  // namespace conetorsion
