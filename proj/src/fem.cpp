#include "conetorsion/fem.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "conetorsion/errors.hpp"
#include "conetorsion/parallel.hpp"

namespace conetorsion {

namespace {

constexpr double kPi = std::numbers::pi;

// degree-5 triangle quadrature (7 points, barycentric)
struct QuadPoint {
  double l1, l2, l3, w;
};
constexpr QuadPoint kQuad5[7] = {
    {1.0 / 3, 1.0 / 3, 1.0 / 3, 0.225},
    {0.797426985353087, 0.101286507323456, 0.101286507323456, 0.125939180544827},
    {0.101286507323456, 0.797426985353087, 0.101286507323456, 0.125939180544827},
    {0.101286507323456, 0.101286507323456, 0.797426985353087, 0.125939180544827},
    {0.059715871789770, 0.470142064105115, 0.470142064105115, 0.132394152788506},
    {0.470142064105115, 0.059715871789770, 0.470142064105115, 0.132394152788506},
    {0.470142064105115, 0.470142064105115, 0.059715871789770, 0.132394152788506},
};

struct ElementGeom {
  double area;
  double weight;        // 1 or 2*pi*rbar
  double gx[3], gy[3];  // P1 basis gradients
};

ElementGeom element_geom(const SectorMesh& m, int e) {
  const auto& t = m.triangles[e];
  const auto& a = m.vertices[t[0]];
  const auto& b = m.vertices[t[1]];
  const auto& c = m.vertices[t[2]];
  const double det = (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0]);
  ElementGeom g;
  g.area = 0.5 * det;
  g.weight = m.cone.planar2d() ? 1.0 : 2.0 * kPi * (a[0] + b[0] + c[0]) / 3.0;
  g.gx[0] = (b[1] - c[1]) / det;
  g.gy[0] = (c[0] - b[0]) / det;
  g.gx[1] = (c[1] - a[1]) / det;
  g.gy[1] = (a[0] - c[0]) / det;
  g.gx[2] = (a[1] - b[1]) / det;
  g.gy[2] = (b[0] - a[0]) / det;
  return g;
}

// stiffness 3x3 (row-major) and load 3-vector of one element; the load is the
// exact integral of w*phi_i, which for the axisymmetric weight 2*pi*r is
// 2*pi*A*(2 r_i + r_j + r_k)/12
void element_kernel(const SectorMesh& m, int e, double ke[9], double fe[3]) {
  const ElementGeom g = element_geom(m, e);
  const double wa = g.weight * g.area;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) ke[3 * i + j] = wa * (g.gx[i] * g.gx[j] + g.gy[i] * g.gy[j]);
  if (m.cone.planar2d()) {
    fe[0] = fe[1] = fe[2] = g.area / 3.0;
  } else {
    const auto& t = m.triangles[e];
    const double r0 = m.vertices[t[0]][0], r1 = m.vertices[t[1]][0], r2 = m.vertices[t[2]][0];
    fe[0] = 2.0 * kPi * g.area * (2.0 * r0 + r1 + r2) / 12.0;
    fe[1] = 2.0 * kPi * g.area * (r0 + 2.0 * r1 + r2) / 12.0;
    fe[2] = 2.0 * kPi * g.area * (r0 + r1 + 2.0 * r2) / 12.0;
  }
}

CsrMatrix build_pattern(const SectorMesh& m) {
  const int n = m.n_vertices();
  std::vector<std::vector<int>> adj(n);
  for (int i = 0; i < n; ++i) adj[i].push_back(i);
  for (const auto& t : m.triangles)
    for (int a = 0; a < 3; ++a)
      for (int b = 0; b < 3; ++b)
        if (a != b) adj[t[a]].push_back(t[b]);
  CsrMatrix K;
  K.n = n;
  K.row_ptr.assign(n + 1, 0);
  for (int i = 0; i < n; ++i) {
    auto& row = adj[i];
    std::sort(row.begin(), row.end());
    row.erase(std::unique(row.begin(), row.end()), row.end());
    K.row_ptr[i + 1] = K.row_ptr[i] + static_cast<int>(row.size());
  }
  K.col_idx.reserve(K.row_ptr[n]);
  for (int i = 0; i < n; ++i) K.col_idx.insert(K.col_idx.end(), adj[i].begin(), adj[i].end());
  K.values.assign(K.col_idx.size(), 0.0);
  return K;
}

int csr_slot(const CsrMatrix& K, int i, int j) {
  const int* begin = K.col_idx.data() + K.row_ptr[i];
  const int* end = K.col_idx.data() + K.row_ptr[i + 1];
  const int* it = std::lower_bound(begin, end, j);
  return static_cast<int>(it - K.col_idx.data());
}

void scatter_element(CsrMatrix& K, std::vector<double>& load, const std::array<int, 3>& t,
                     const double ke[9], const double fe[3]) {
  for (int a = 0; a < 3; ++a) {
    load[t[a]] += fe[a];
    for (int b = 0; b < 3; ++b) K.values[csr_slot(K, t[a], t[b])] += ke[3 * a + b];
  }
}

// symmetric elimination of Dirichlet dofs with boundary values g:
// fixed rows keep only their diagonal, free rows move K_ij*g_j to the load
void apply_dirichlet(CsrMatrix& K, std::vector<double>& b, const std::vector<char>& fixed,
                     const std::vector<double>& g) {
  for (int i = 0; i < K.n; ++i) {
    for (int s = K.row_ptr[i]; s < K.row_ptr[i + 1]; ++s) {
      const int j = K.col_idx[s];
      if (fixed[i]) {
        if (j == i)
          b[i] = K.values[s] * g[i];
        else
          K.values[s] = 0.0;
      } else if (fixed[j]) {
        b[i] -= K.values[s] * g[j];
        K.values[s] = 0.0;
      }
    }
  }
}

double det_dot(const std::vector<double>& x, const std::vector<double>& y) {
  return deterministic_sum(static_cast<std::ptrdiff_t>(x.size()),
                           [&](std::ptrdiff_t i) { return x[i] * y[i]; });
}

// IC(0): incomplete Cholesky on the lower-triangular pattern of K. The
// factorization and the two triangular sweeps are sequential and
// deterministic. A diagonal shift retries the factorization on breakdown.
struct IcFactor {
  // lower factor in CSR (columns sorted, diagonal last in each row) and its
  // transpose for the backward sweep
  std::vector<int> lp, lj, up, uj;
  std::vector<double> lv, uv;
  int n = 0;

  bool build(const CsrMatrix& K, double shift) {
    n = K.n;
    lp.assign(n + 1, 0);
    lj.clear();
    lv.clear();
    for (int i = 0; i < n; ++i) {
      for (int s = K.row_ptr[i]; s < K.row_ptr[i + 1]; ++s)
        if (K.col_idx[s] <= i) {
          lj.push_back(K.col_idx[s]);
          lv.push_back(K.values[s]);
          if (K.col_idx[s] == i) lv.back() *= 1.0 + shift;
        }
      lp[i + 1] = static_cast<int>(lj.size());
    }
    for (int i = 0; i < n; ++i) {
      const int row_begin = lp[i], row_end = lp[i + 1];
      for (int s = row_begin; s < row_end; ++s) {
        const int j = lj[s];
        // dot of rows i and j over columns < j (sorted two-pointer merge)
        double acc = 0.0;
        int a = row_begin, b = lp[j];
        const int bend = lp[j + 1] - 1;  // skip the diagonal of row j
        while (a < s && b < bend) {
          if (lj[a] == lj[b]) {
            acc += lv[a] * lv[b];
            ++a;
            ++b;
          } else if (lj[a] < lj[b]) {
            ++a;
          } else {
            ++b;
          }
        }
        if (j < i) {
          lv[s] = (lv[s] - acc) / lv[lp[j + 1] - 1];
        } else {
          const double d = lv[s] - acc;
          if (!(d > 0.0)) return false;
          lv[s] = std::sqrt(d);
        }
      }
    }
    // transpose for the backward sweep
    up.assign(n + 1, 0);
    for (int i = 0; i < n; ++i)
      for (int s = lp[i]; s < lp[i + 1]; ++s) ++up[lj[s] + 1];
    for (int i = 0; i < n; ++i) up[i + 1] += up[i];
    uj.assign(lj.size(), 0);
    uv.assign(lv.size(), 0.0);
    std::vector<int> cursor(up.begin(), up.end() - 1);
    for (int i = 0; i < n; ++i)
      for (int s = lp[i]; s < lp[i + 1]; ++s) {
        const int pos = cursor[lj[s]]++;
        uj[pos] = i;
        uv[pos] = lv[s];
      }
    return true;
  }

  void apply(const std::vector<double>& r, std::vector<double>& z, std::vector<double>& tmp) const {
    // L y = r
    for (int i = 0; i < n; ++i) {
      double s = r[i];
      for (int k = lp[i]; k < lp[i + 1] - 1; ++k) s -= lv[k] * tmp[lj[k]];
      tmp[i] = s / lv[lp[i + 1] - 1];
    }
    // L^T z = y
    for (int i = n - 1; i >= 0; --i) {
      double s = tmp[i];
      for (int k = up[i] + 1; k < up[i + 1]; ++k) s -= uv[k] * z[uj[k]];
      z[i] = s / uv[up[i]];
    }
  }
};

FemField solve_mixed(std::shared_ptr<const SectorMesh> mesh, const std::vector<double>& dirichlet,
                     bool unit_load, double solver_tol, CgResult* stats) {
  const SectorMesh& m = *mesh;
  if (m.gamma_facet_indices().empty()) throw NoDirichletBoundary();
  AssembledSystem sys = assemble_poisson(m);
  std::vector<double> b = unit_load ? sys.load : std::vector<double>(m.n_vertices(), 0.0);
  const std::vector<char> fixed = m.gamma_vertex_mask();
  apply_dirichlet(sys.stiffness, b, fixed, dirichlet);
  FemField u;
  u.mesh = std::move(mesh);
  u.values.assign(m.n_vertices(), 0.0);
  const CgResult res = pcg(sys.stiffness, b, u.values, solver_tol);
  if (stats) *stats = res;
  return u;
}

}  // namespace

double CsrMatrix::diagonal(int i) const {
  for (int s = row_ptr[i]; s < row_ptr[i + 1]; ++s)
    if (col_idx[s] == i) return values[s];
  return 0.0;
}

void spmv(const CsrMatrix& K, const std::vector<double>& x, std::vector<double>& y) {
  y.resize(x.size());
  parallel_for(K.n, [&](std::ptrdiff_t i) {
    double s = 0.0;
    for (int k = K.row_ptr[i]; k < K.row_ptr[i + 1]; ++k) s += K.values[k] * x[K.col_idx[k]];
    y[i] = s;
  });
}

void spmv_serial(const CsrMatrix& K, const std::vector<double>& x, std::vector<double>& y) {
  y.resize(x.size());
  for (int i = 0; i < K.n; ++i) {
    double s = 0.0;
    for (int k = K.row_ptr[i]; k < K.row_ptr[i + 1]; ++k) s += K.values[k] * x[K.col_idx[k]];
    y[i] = s;
  }
}

AssembledSystem assemble_poisson(const SectorMesh& m) {
  AssembledSystem sys;
  sys.stiffness = build_pattern(m);
  sys.load.assign(m.n_vertices(), 0.0);
  const int ne = m.n_elements();
  // element kernels in parallel, then a fixed-order scatter: results are
  // bitwise independent of the thread count
  std::vector<double> ke(static_cast<std::size_t>(ne) * 9);
  std::vector<double> fe(static_cast<std::size_t>(ne) * 3);
  parallel_for(ne, [&](std::ptrdiff_t e) { element_kernel(m, static_cast<int>(e), &ke[9 * e], &fe[3 * e]); });
  for (int e = 0; e < ne; ++e)
    scatter_element(sys.stiffness, sys.load, m.triangles[e], &ke[9 * e], &fe[3 * e]);
  return sys;
}

AssembledSystem assemble_poisson_serial(const SectorMesh& m) {
  AssembledSystem sys;
  sys.stiffness = build_pattern(m);
  sys.load.assign(m.n_vertices(), 0.0);
  double ke[9], fe[3];
  for (int e = 0; e < m.n_elements(); ++e) {
    element_kernel(m, e, ke, fe);
    scatter_element(sys.stiffness, sys.load, m.triangles[e], ke, fe);
  }
  return sys;
}

CgResult pcg(const CsrMatrix& K, const std::vector<double>& b, std::vector<double>& x, double tol,
             Preconditioner prec) {
  const int n = K.n;
  x.assign(n, 0.0);
  const double bnorm = std::sqrt(det_dot(b, b));
  if (bnorm == 0.0) return {0, 0.0};

  std::vector<double> invdiag;
  IcFactor ic;
  if (prec == Preconditioner::IncompleteCholesky) {
    bool ok = false;
    for (double shift : {0.0, 1e-3, 1e-2, 1e-1}) {
      if (ic.build(K, shift)) {
        ok = true;
        break;
      }
    }
    if (!ok) prec = Preconditioner::Jacobi;
  }
  if (prec == Preconditioner::Jacobi) {
    invdiag.resize(n);
    for (int i = 0; i < n; ++i) {
      const double d = K.diagonal(i);
      if (!(d > 0.0)) throw NonConvergence("non-positive diagonal in CG");
      invdiag[i] = 1.0 / d;
    }
  }

  std::vector<double> r = b, z(n), p(n), q(n), tmp(n);
  auto precondition = [&]() {
    if (prec == Preconditioner::Jacobi)
      parallel_for(n, [&](std::ptrdiff_t i) { z[i] = invdiag[i] * r[i]; });
    else
      ic.apply(r, z, tmp);
  };
  precondition();
  p = z;
  double rz = det_dot(r, z);
  const int cap = static_cast<int>(50.0 * std::sqrt(static_cast<double>(n))) + 10;
  for (int it = 1; it <= cap; ++it) {
    spmv(K, p, q);
    const double pq = det_dot(p, q);
    if (!(pq > 0.0)) throw NonConvergence("loss of positive definiteness in CG");
    const double alpha = rz / pq;
    parallel_for(n, [&](std::ptrdiff_t i) {
      x[i] += alpha * p[i];
      r[i] -= alpha * q[i];
    });
    const double rnorm = std::sqrt(det_dot(r, r));
    if (rnorm <= tol * bnorm) return {it, rnorm / bnorm};
    precondition();
    const double rz_new = det_dot(r, z);
    const double beta = rz_new / rz;
    rz = rz_new;
    parallel_for(n, [&](std::ptrdiff_t i) { p[i] = z[i] + beta * p[i]; });
  }
  throw NonConvergence("CG exceeded the iteration cap");
}

FemField solve_torsion(std::shared_ptr<const SectorMesh> mesh, double solver_tol) {
  const std::vector<double> zero(mesh->n_vertices(), 0.0);
  return solve_mixed(std::move(mesh), zero, /*unit_load=*/true, solver_tol, nullptr);
}

double functional_J(const FemField& v) {
  return 0.5 * dirichlet_energy_of(v) - integrate(v);
}

std::vector<FluxSample> boundary_flux(const FemField& u) {
  const SectorMesh& m = *u.mesh;
  const std::vector<int> facets = m.gamma_facet_indices();
  const std::vector<int> owners = m.gamma_facet_elements();
  std::vector<FluxSample> out(facets.size());
  for (std::size_t k = 0; k < facets.size(); ++k) {
    const int e = owners[k];
    const ElementGeom g = element_geom(m, e);
    const auto& t = m.triangles[e];
    double gx = 0.0, gy = 0.0;
    for (int a = 0; a < 3; ++a) {
      gx += u.values[t[a]] * g.gx[a];
      gy += u.values[t[a]] * g.gy[a];
    }
    out[k].value = std::sqrt(gx * gx + gy * gy);
    out[k].measure = m.facet_measure(facets[k]);
    out[k].theta = m.facet_theta(facets[k]);
  }
  return out;
}

TorsionReport report_from_solution(const FemField& u) {
  TorsionReport rep;
  rep.mass = integrate(u);
  rep.dirichlet_energy = dirichlet_energy_of(u);
  rep.energy_T = -0.5 * rep.mass;
  rep.functional_J_value = 0.5 * rep.dirichlet_energy - rep.mass;
  rep.rayleigh_T = -(rep.mass * rep.mass) / (2.0 * rep.dirichlet_energy);
  rep.flux_on_gamma = boundary_flux(u);
  double fm = 0.0, meas = 0.0;
  for (const auto& s : rep.flux_on_gamma) {
    fm += s.value * s.measure;
    meas += s.measure;
  }
  rep.flux_mean = fm / meas;
  double dev = 0.0;
  for (const auto& s : rep.flux_on_gamma) dev = std::max(dev, std::abs(s.value - rep.flux_mean));
  rep.flux_deviation = dev;
  return rep;
}

TorsionReport torsional_energy(std::shared_ptr<const SectorMesh> mesh, double solver_tol) {
  CgResult stats;
  const std::vector<double> zero(mesh->n_vertices(), 0.0);
  FemField u = solve_mixed(mesh, zero, /*unit_load=*/true, solver_tol, &stats);
  TorsionReport rep = report_from_solution(u);
  rep.cg_iterations = stats.iterations;
  rep.cg_residual = stats.rel_residual;
  return rep;
}

FemField solve_linearization(const FemField& u, const std::vector<double>& normal_velocity,
                             double solver_tol) {
  const SectorMesh& m = *u.mesh;
  const std::vector<int> facets = m.gamma_facet_indices();
  if (normal_velocity.size() != facets.size())
    throw std::invalid_argument("normal_velocity needs one value per GAMMA facet");
  const std::vector<FluxSample> flux = boundary_flux(u);
  // Dirichlet trace u' = -(du/dnu) <V,nu> = |grad u| <V,nu>, facet values
  // averaged onto nodes with facet-length weights
  std::vector<double> g(m.n_vertices(), 0.0), wsum(m.n_vertices(), 0.0);
  for (std::size_t k = 0; k < facets.size(); ++k) {
    const auto& bf = m.boundary_facets[facets[k]];
    const double val = flux[k].value * normal_velocity[k];
    const double w = m.facet_length(facets[k]);
    g[bf.a] += w * val;
    wsum[bf.a] += w;
    g[bf.b] += w * val;
    wsum[bf.b] += w;
  }
  for (int i = 0; i < m.n_vertices(); ++i)
    if (wsum[i] > 0.0) g[i] /= wsum[i];
  return solve_mixed(u.mesh, g, /*unit_load=*/false, solver_tol, nullptr);
}

double integrate(const FemField& v) {
  const SectorMesh& m = *v.mesh;
  return deterministic_sum(m.n_elements(), [&](std::ptrdiff_t e) {
    double ke[9], fe[3];
    element_kernel(m, static_cast<int>(e), ke, fe);
    const auto& t = m.triangles[e];
    return fe[0] * v.values[t[0]] + fe[1] * v.values[t[1]] + fe[2] * v.values[t[2]];
  });
}

double dirichlet_energy_of(const FemField& v) {
  return gradient_p_norm(v, 2.0);
}

double gradient_p_norm(const FemField& v, double p) {
  const SectorMesh& m = *v.mesh;
  return deterministic_sum(m.n_elements(), [&](std::ptrdiff_t e) {
    const ElementGeom g = element_geom(m, static_cast<int>(e));
    const auto& t = m.triangles[e];
    double gx = 0.0, gy = 0.0;
    for (int a = 0; a < 3; ++a) {
      gx += v.values[t[a]] * g.gx[a];
      gy += v.values[t[a]] * g.gy[a];
    }
    const double mag = std::sqrt(gx * gx + gy * gy);
    return g.weight * g.area * (p == 2.0 ? mag * mag : std::pow(mag, p));
  });
}

double integrate_abs_power(const FemField& v, double p) {
  const SectorMesh& m = *v.mesh;
  const bool planar = m.cone.planar2d();
  return deterministic_sum(m.n_elements(), [&](std::ptrdiff_t e) {
    const auto& t = m.triangles[e];
    const double area = m.element_area(static_cast<int>(e));
    double s = 0.0;
    for (const auto& q : kQuad5) {
      const double val = q.l1 * v.values[t[0]] + q.l2 * v.values[t[1]] + q.l3 * v.values[t[2]];
      const double rq =
          q.l1 * m.vertices[t[0]][0] + q.l2 * m.vertices[t[1]][0] + q.l3 * m.vertices[t[2]][0];
      const double w = planar ? 1.0 : 2.0 * kPi * rq;
      s += q.w * w * std::pow(std::abs(val), p);
    }
    return area * s;
  });
}

}  // namespace conetorsion
