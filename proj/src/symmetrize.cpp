#include "conetorsion/symmetrize.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "conetorsion/errors.hpp"
#include "conetorsion/parallel.hpp"

namespace conetorsion {

namespace {

constexpr double kPi = std::numbers::pi;

// Weighted measure of the part of a linear triangle where the interpolant
// exceeds t: clip the triangle by the level line, then integrate the weight
// (1 or 2*pi*r) over the resulting polygon exactly.
double clip_above(const std::array<double, 2>* xy, const double* v, double t, bool planar) {
  double px[4], py[4];
  int np = 0;
  for (int k = 0; k < 3; ++k) {
    const int a = k, b = (k + 1) % 3;
    const bool ina = v[a] > t, inb = v[b] > t;
    if (ina) {
      px[np] = xy[a][0];
      py[np] = xy[a][1];
      ++np;
    }
    if (ina != inb) {
      const double s = (t - v[a]) / (v[b] - v[a]);
      px[np] = xy[a][0] + s * (xy[b][0] - xy[a][0]);
      py[np] = xy[a][1] + s * (xy[b][1] - xy[a][1]);
      ++np;
    }
  }
  if (np < 3) return 0.0;
  double area2 = 0.0, rint6 = 0.0;  // 2*area and 6*int(x dA)
  for (int k = 0; k < np; ++k) {
    const int j = (k + 1) % np;
    const double cross = px[k] * py[j] - px[j] * py[k];
    area2 += cross;
    rint6 += (px[k] + px[j]) * cross;
  }
  if (planar) return 0.5 * area2;
  return 2.0 * kPi * rint6 / 6.0;
}

// superlevel measure of |u_h| > t on one element
double element_superlevel(const SectorMesh& m, const std::vector<double>& values, int e, double t) {
  const auto& tri = m.triangles[e];
  const std::array<double, 2> xy[3] = {m.vertices[tri[0]], m.vertices[tri[1]],
                                       m.vertices[tri[2]]};
  const double v[3] = {values[tri[0]], values[tri[1]], values[tri[2]]};
  const bool planar = m.cone.planar2d();
  double s = 0.0;
  if (std::max({v[0], v[1], v[2]}) > t) s += clip_above(xy, v, t, planar);
  // |u| > t also collects the region u < -t
  if (std::min({v[0], v[1], v[2]}) < -t) {
    const double nv[3] = {-v[0], -v[1], -v[2]};
    s += clip_above(xy, nv, t, planar);
  }
  return s;
}

// mu over an increasing level grid. Levels are processed in fixed chunks
// (each level owned by exactly one chunk, contributions added in element
// order), so results do not depend on the thread count. The chunk count is a
// function of the grid size only.
std::vector<double> distribution_core(const FemField& u, const std::vector<double>& t_grid,
                                      bool parallel) {
  const SectorMesh& m = *u.mesh;
  const int nt = static_cast<int>(t_grid.size());
  const int ne = m.n_elements();
  for (int j = 1; j < nt; ++j)
    if (!(t_grid[j] > t_grid[j - 1])) throw std::invalid_argument("t_grid must be increasing");

  const int chunk = 128;
  const int nchunks = (nt + chunk - 1) / chunk;
  std::vector<double> mu(nt, 0.0);
  auto process_chunk = [&](std::ptrdiff_t c) {
    const int j0 = static_cast<int>(c) * chunk;
    const int j1 = std::min(nt, j0 + chunk);
    std::vector<double> full(j1 - j0 + 1, 0.0);  // difference array for full-area levels
    for (int e = 0; e < ne; ++e) {
      const auto& tri = m.triangles[e];
      double lo = u.values[tri[0]], hi = lo;
      for (int k = 1; k < 3; ++k) {
        lo = std::min(lo, u.values[tri[k]]);
        hi = std::max(hi, u.values[tri[k]]);
      }
      const double alo = std::min(std::abs(lo), std::abs(hi));
      const double ahi = std::max(std::abs(lo), std::abs(hi));
      const double cover = lo < 0.0 && hi > 0.0 ? 0.0 : alo;  // |u| > t on all of e for t < cover
      // levels below `cover` get the whole element
      const int jfull =
          static_cast<int>(std::lower_bound(t_grid.begin() + j0, t_grid.begin() + j1, cover) -
                           (t_grid.begin() + j0));
      if (jfull > 0) {
        const double a = m.element_weight(e) * m.element_area(e);
        full[0] += a;
        full[jfull] -= a;
      }
      // levels in [cover, ahi) need clipping
      if (ahi <= t_grid[j0]) continue;
      for (int j = j0 + jfull; j < j1; ++j) {
        if (t_grid[j] >= ahi) break;
        mu[j] += element_superlevel(m, u.values, e, t_grid[j]);
      }
    }
    double acc = 0.0;
    for (int j = j0; j < j1; ++j) {
      acc += full[j - j0];
      mu[j] += acc;
    }
  };
  if (parallel)
    parallel_for(nchunks, process_chunk);
  else
    serial_for(nchunks, process_chunk);
  return mu;
}

}  // namespace

std::vector<double> distribution_function(const FemField& u, const std::vector<double>& t_grid) {
  return distribution_core(u, t_grid, true);
}

std::vector<double> distribution_function_serial(const FemField& u,
                                                 const std::vector<double>& t_grid) {
  return distribution_core(u, t_grid, false);
}

double RearrangedProfile::eval(double s) const {
  if (s <= breakpoints.front()) return values.front();
  if (s >= breakpoints.back()) return values.back();
  const auto it = std::upper_bound(breakpoints.begin(), breakpoints.end(), s);
  const std::size_t j = static_cast<std::size_t>(it - breakpoints.begin());
  const double s0 = breakpoints[j - 1], s1 = breakpoints[j];
  const double f = (s - s0) / (s1 - s0);
  return (1.0 - f) * values[j - 1] + f * values[j];
}

RearrangedProfile decreasing_rearrangement(const FemField& u, int n_bins) {
  if (n_bins < 16) throw std::invalid_argument("decreasing_rearrangement needs n_bins >= 16");
  const SectorMesh& m = *u.mesh;
  double vmax = 0.0;
  for (double v : u.values) vmax = std::max(vmax, std::abs(v));
  const double total = m.mesh_measure();

  RearrangedProfile out;
  out.total_measure = total;
  out.breakpoints.resize(n_bins + 1);
  out.values.assign(n_bins + 1, 0.0);
  for (int k = 0; k <= n_bins; ++k) out.breakpoints[k] = total * k / n_bins;
  if (vmax == 0.0) return out;

  std::vector<double> levels(n_bins + 1);
  for (int j = 0; j <= n_bins; ++j) levels[j] = vmax * j / n_bins;
  const std::vector<double> mu = distribution_function(u, levels);

  // u#(s) = inf{ t : mu(t) < s }, inverted by linear interpolation between
  // the bracketing level samples
  out.values[0] = vmax;
  for (int k = 1; k <= n_bins; ++k) {
    const double s = out.breakpoints[k];
    // first level index with mu < s (mu is nonincreasing)
    int lo = 0, hi = n_bins;
    while (lo < hi) {
      const int mid = (lo + hi) / 2;
      if (mu[mid] < s)
        hi = mid;
      else
        lo = mid + 1;
    }
    double t;
    if (lo == 0)
      t = 0.0;
    else {
      const double m0 = mu[lo - 1], m1 = mu[lo];
      const double f = m0 > m1 ? (m0 - s) / (m0 - m1) : 1.0;
      t = levels[lo - 1] + f * (levels[lo] - levels[lo - 1]);
    }
    out.values[k] = std::min(t, out.values[k - 1]);
  }
  return out;
}

FemField omega_symmetrize(const FemField& u, std::shared_ptr<const SectorMesh> target_mesh,
                          int n_bins) {
  const double vs = u.mesh->graph_volume;
  const double vt = target_mesh->graph_volume;
  if (std::abs(vt - vs) > 1e-8 * std::max(vs, vt))
    throw VolumeMismatch("target sector volume differs from |Omega| beyond 1e-8 relative");
  const RearrangedProfile r = decreasing_rearrangement(u, n_bins);
  const double wn = target_mesh->cone.omega_measure();
  const int n_dim = target_mesh->cone.dimension();
  FemField out;
  out.values.resize(target_mesh->n_vertices());
  for (int i = 0; i < target_mesh->n_vertices(); ++i) {
    const auto& x = target_mesh->vertices[i];
    const double rr = std::sqrt(x[0] * x[0] + x[1] * x[1]);
    const double s = wn * std::pow(rr, n_dim);
    out.values[i] = r.eval(s);
  }
  out.mesh = std::move(target_mesh);
  return out;
}

double rearranged_p_integral(const RearrangedProfile& r, double p) {
  double total = 0.0;
  for (std::size_t k = 1; k < r.breakpoints.size(); ++k) {
    const double len = r.breakpoints[k] - r.breakpoints[k - 1];
    const double a = r.values[k - 1], b = r.values[k];
    if (a == b) {
      total += std::pow(std::abs(a), p) * len;
    } else {
      // int_0^L |a + (b-a) s/L|^p ds, a,b >= 0
      const double slope = (b - a) / len;
      total += (std::pow(b, p + 1.0) - std::pow(a, p + 1.0)) / (slope * (p + 1.0));
    }
  }
  return total;
}

double symmetrized_gradient_p_norm(const RearrangedProfile& r, const ConeSpec& cone, double p) {
  // int |grad u*|^p over the sector, written in the measure variable
  // s = omega_N rad^N:
  //   int_0^M |u#'(s)|^p (N omega_N rad(s)^{N-1})^p ds,
  // with rad(s)^{N-1} = (s/omega_N)^{(N-1)/N}; exact per bin for the
  // piecewise-linear u#.
  const double wn = cone.omega_measure();
  const int n_dim = cone.dimension();
  const double q = p * (n_dim - 1) / n_dim;
  const double front = std::pow(static_cast<double>(n_dim) * wn, p) * std::pow(wn, -q);
  double total = 0.0;
  for (std::size_t k = 1; k < r.breakpoints.size(); ++k) {
    const double s0 = r.breakpoints[k - 1], s1 = r.breakpoints[k];
    const double slope = (r.values[k] - r.values[k - 1]) / (s1 - s0);
    if (slope == 0.0) continue;
    const double seg = (std::pow(s1, q + 1.0) - std::pow(s0, q + 1.0)) / (q + 1.0);
    total += std::pow(std::abs(slope), p) * front * seg;
  }
  return total;
}

double polya_szego_gap(const FemField& u, double p, int n_bins) {
  if (!(p >= 1.0)) throw std::invalid_argument("polya_szego_gap needs p >= 1");
  const double lhs = gradient_p_norm(u, p);
  const RearrangedProfile r = decreasing_rearrangement(u, n_bins);
  const double rhs = symmetrized_gradient_p_norm(r, u.mesh->cone, p);
  return lhs - rhs;
}

}  // namespace conetorsion
