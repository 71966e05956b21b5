#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "conetorsion/cone.hpp"

namespace conetorsion {

enum class CurvatureSource : std::uint8_t { Analytic, Estimated };

// Discretized relative boundary Gamma: an ordered planar curve from wall ray
// to wall ray, or an axisymmetric meridian from the axis to the wall. Points
// are (x, y) planar or (r, z) meridian; normals are in-plane outward units.
// k1 is the curve/meridian curvature; k2 (axisymmetric only) the parallel
// principal curvature.
struct CurveGamma {
  ConeSpec cone;
  std::vector<std::array<double, 2>> points;
  std::vector<std::array<double, 2>> normals;
  std::vector<double> k1;
  std::vector<double> k2;  // empty for planar curves
  CurvatureSource curvature_source = CurvatureSource::Analytic;

  int n_samples() const { return static_cast<int>(points.size()); }
  double mean_curvature(int i) const;
  // throws std::invalid_argument on violated invariants
  void validate() const;
};

struct CenterFit {
  std::array<double, 2> center{0.0, 0.0};
  double radius = 0.0;
  double max_fit_residual = 0.0;
};

enum class CenterClass : std::uint8_t { Vertex, Wall, Neither };

struct CenterReport {
  CenterFit fit;
  CenterClass classification = CenterClass::Neither;
  // Vertex is always admissible; Wall only for the planar half-plane cone
  // (alpha = pi), the one case with a flat wall portion.
  bool admissible = false;
};

// max over the endpoints of |<nu_Gamma, nu_wall>|; the axisymmetric axis
// endpoint contributes |nu_r| (meridian regularity across the axis).
double orthogonality_defect(const CurveGamma& c);

// quadrature value of int_Gamma (1 - H <x, nu>) dsigma
double minkowski1_residual(const CurveGamma& c);

// |Hbar - P_omega(Omega) / (N |Omega|)| for the boundary curve of g.
// Throws NonConstantCurvature when sampled H spreads more than
// max_relative_spread.
double mean_curvature_identity_gap(const CurveGamma& c, const PolarGraph& g,
                                   double max_relative_spread = 1e-3);

struct UmbilicityReport {
  double gap = 0.0;                  // max over samples of H^2 - sigma2 = ((k1-k2)/2)^2
  double minkowski2_residual = 0.0;  // int_Gamma (H - sigma2 <x, nu>) dsigma
};

// axisymmetric curves only
UmbilicityReport umbilicity_gap(const CurveGamma& c);

struct CenterFitParams {
  double classification_tol = 1e-6;  // relative to the fitted radius
  double fit_residual_tol = 1e-3;    // relative to the fitted radius; NotSpherical above
};

// Algebraic least-squares circle fit (normal equations) plus one geometric
// Gauss-Newton refinement, then the vertex/wall classification.
// Throws NotSpherical when the fit residual exceeds the threshold.
CenterReport locate_center(const CurveGamma& c, const CenterFitParams& params = {});

// --- analytic test surfaces ---

// circular arc of radius R about the vertex, orthogonal to the walls
CurveGamma arc_about_vertex(const ConeSpec& cone, double radius, int n);
// planar arc about an arbitrary center, endpoints on both wall rays
CurveGamma arc_about(const ConeSpec& cone, std::array<double, 2> center, double radius, int n);
// half-circle about (cx, 0) on the boundary of the half-plane cone alpha = pi
CurveGamma half_circle_on_wall(double cx, double radius, int n);
// spherical cap of radius R about the vertex (axisymmetric meridian)
CurveGamma spherical_cap(const ConeSpec& cone, double radius, int n);
// meridian of the spheroid r = a sin t, z = c cos t up to the cone wall
CurveGamma spheroid_cap(const ConeSpec& cone, double a, double c, int n);

// boundary curve of a polar graph with finite-difference curvature data
CurveGamma curve_from_graph(const PolarGraph& g);

}  // namespace conetorsion
