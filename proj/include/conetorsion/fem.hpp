#pragma once

#include <memory>
#include <vector>

#include "conetorsion/mesh.hpp"

namespace conetorsion {

struct CsrMatrix {
  int n = 0;
  std::vector<int> row_ptr;
  std::vector<int> col_idx;
  std::vector<double> values;

  double diagonal(int i) const;
};

// y = K x; row-parallel, bitwise independent of the thread count.
void spmv(const CsrMatrix& K, const std::vector<double>& x, std::vector<double>& y);
void spmv_serial(const CsrMatrix& K, const std::vector<double>& x, std::vector<double>& y);

// P1 stiffness and load for -div(w grad u) = w with w = 1 (planar) or
// w = 2 pi r (axisymmetric). The load vector doubles as the lumped mass:
// b_i = int w phi_i exactly, so sum_i b_i u_i = int w u_h exactly.
struct AssembledSystem {
  CsrMatrix stiffness;  // no boundary conditions applied
  std::vector<double> load;
};

AssembledSystem assemble_poisson(const SectorMesh& m);
AssembledSystem assemble_poisson_serial(const SectorMesh& m);

struct CgResult {
  int iterations = 0;
  double rel_residual = 0.0;
};

enum class Preconditioner { IncompleteCholesky, Jacobi };

// Preconditioned CG, x0 = 0, iteration cap 50*sqrt(n). IC(0) is the default;
// plain Jacobi needs roughly 5x the iterations on graded meshes and blows the
// cap at fine resolutions. Throws NonConvergence when the cap is hit.
CgResult pcg(const CsrMatrix& K, const std::vector<double>& b, std::vector<double>& x, double tol,
             Preconditioner prec = Preconditioner::IncompleteCholesky);

// Nodal scalar field on a mesh.
struct FemField {
  std::shared_ptr<const SectorMesh> mesh;
  std::vector<double> values;
};

struct FluxSample {
  double value = 0.0;    // |grad u| from the adjacent element
  double measure = 0.0;  // facet measure (weighted for axisymmetric meshes)
  double theta = 0.0;    // facet midpoint angle
};

struct TorsionReport {
  double energy_T = 0.0;          // -1/2 int u
  double dirichlet_energy = 0.0;  // int |grad u|^2
  double mass = 0.0;              // int u
  double rayleigh_T = 0.0;        // -(int u)^2 / (2 int |grad u|^2)
  double functional_J_value = 0.0;
  double flux_mean = 0.0;       // measure-weighted mean of |grad u| on Gamma
  double flux_deviation = 0.0;  // max |flux - flux_mean|
  std::vector<FluxSample> flux_on_gamma;
  int cg_iterations = 0;
  double cg_residual = 0.0;
};

// Galerkin solution of -Lap u = 1, u = 0 on GAMMA, natural on GAMMA1.
FemField solve_torsion(std::shared_ptr<const SectorMesh> mesh, double solver_tol = 1e-10);

// J(v) = 1/2 int |grad v|^2 - int v
double functional_J(const FemField& v);

TorsionReport torsional_energy(std::shared_ptr<const SectorMesh> mesh, double solver_tol = 1e-10);

// all report fields from an existing solution (CG stats left zero)
TorsionReport report_from_solution(const FemField& u);

// |grad u| per GAMMA facet from the adjacent element's P1 gradient.
std::vector<FluxSample> boundary_flux(const FemField& u);

// Harmonic mixed problem for the shape-perturbation field:
// -Lap u' = 0, u' = |grad u|*<V,nu> on GAMMA (one value per GAMMA facet),
// natural on GAMMA1.
FemField solve_linearization(const FemField& u, const std::vector<double>& normal_velocity,
                             double solver_tol = 1e-10);

// Exact integrals of P1 fields (deterministic ordered reductions).
double integrate(const FemField& v);                   // int w v
double dirichlet_energy_of(const FemField& v);         // int w |grad v|^2
double gradient_p_norm(const FemField& v, double p);   // int w |grad v|^p
double integrate_abs_power(const FemField& v, double p);  // int w |v|^p, degree-5 quadrature

}  // namespace conetorsion
