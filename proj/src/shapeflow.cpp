#include "conetorsion/shapeflow.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <memory>
#include <numbers>
#include <stdexcept>

#include "conetorsion/errors.hpp"

namespace conetorsion {

namespace {

constexpr double kPi = std::numbers::pi;

// <V,nu> dsigma = w * rho dtheta (planar) or 2 pi w rho^2 sin(theta) dtheta
std::vector<double> normal_speed_measure_factor(const PolarGraph& g) {
  const int n = g.n_theta();
  std::vector<double> f(n + 1);
  for (int i = 0; i <= n; ++i) {
    if (g.cone.planar2d())
      f[i] = g.rho[i];
    else
      f[i] = 2.0 * kPi * g.rho[i] * g.rho[i] * std::sin(g.theta(i));
  }
  return f;
}

std::vector<double> arc_factor(const PolarGraph& g) {
  const std::vector<double> dr = profile_derivative(g);
  std::vector<double> f(g.rho.size());
  for (std::size_t i = 0; i < f.size(); ++i)
    f[i] = std::sqrt(g.rho[i] * g.rho[i] + dr[i] * dr[i]);
  return f;
}

std::vector<double> second_derivative(const std::vector<double>& r, double dt) {
  const int n = static_cast<int>(r.size()) - 1;
  std::vector<double> d(r.size());
  d[0] = (2.0 * r[0] - 5.0 * r[1] + 4.0 * r[2] - r[3]) / (dt * dt);
  for (int i = 1; i < n; ++i) d[i] = (r[i + 1] - 2.0 * r[i] + r[i - 1]) / (dt * dt);
  d[n] = (2.0 * r[n] - 5.0 * r[n - 1] + 4.0 * r[n - 2] - r[n - 3]) / (dt * dt);
  return d;
}

// piecewise-linear interpolation of facet samples (theta ascending) at th
double interp_samples(const std::vector<double>& thetas, const std::vector<double>& vals,
                      double th) {
  if (th <= thetas.front()) return vals.front();
  if (th >= thetas.back()) return vals.back();
  const auto it = std::upper_bound(thetas.begin(), thetas.end(), th);
  const std::size_t j = static_cast<std::size_t>(it - thetas.begin());
  const double f = (th - thetas[j - 1]) / (thetas[j] - thetas[j - 1]);
  return (1.0 - f) * vals[j - 1] + f * vals[j];
}

std::vector<double> smooth_once(const std::vector<double>& w) {
  const int n = static_cast<int>(w.size());
  std::vector<double> out(w.size());
  out[0] = 0.5 * (w[0] + w[1]);
  for (int i = 1; i + 1 < n; ++i) out[i] = 0.25 * w[i - 1] + 0.5 * w[i] + 0.25 * w[i + 1];
  out[n - 1] = 0.5 * (w[n - 2] + w[n - 1]);
  return out;
}

struct ObjectiveEval {
  double value = 0.0;
  double residual = 0.0;
  std::vector<double> gradient_density;  // G with d(objective) = int G w dtheta
  // minus the L2(dsigma) shape gradient as a normal speed; the
  // measure-weighted mean removal of project_volume_preserving is the
  // orthogonal projection in that metric, so the projected direction stays a
  // descent direction
  std::vector<double> descent_normal_speed;
};

ObjectiveEval eval_torsion(const PolarGraph& g, const FlowParams& params) {
  auto mesh = std::make_shared<const SectorMesh>(generate_mesh(g, params.mesh));
  const TorsionReport rep = torsional_energy(std::move(mesh), params.solver_tol);
  ObjectiveEval ev;
  ev.value = rep.energy_T;
  ev.residual = rep.flux_deviation / rep.flux_mean;
  std::vector<double> fth(rep.flux_on_gamma.size()), fv(rep.flux_on_gamma.size());
  for (std::size_t k = 0; k < rep.flux_on_gamma.size(); ++k) {
    fth[k] = rep.flux_on_gamma[k].theta;
    fv[k] = rep.flux_on_gamma[k].value;
  }
  const std::vector<double> meas = normal_speed_measure_factor(g);
  ev.gradient_density.resize(g.rho.size());
  ev.descent_normal_speed.resize(g.rho.size());
  for (int i = 0; i <= g.n_theta(); ++i) {
    const double flux = interp_samples(fth, fv, g.theta(i));
    ev.gradient_density[i] = -0.5 * flux * flux * meas[i];
    ev.descent_normal_speed[i] = 0.5 * flux * flux;
  }
  return ev;
}

ObjectiveEval eval_perimeter(const PolarGraph& g, const FlowParams& params) {
  (void)params;
  ObjectiveEval ev;
  ev.value = relative_perimeter(g);
  const int n = g.n_theta();
  std::vector<double> h(n + 1);
  if (g.cone.planar2d()) {
    h = graph_curvature_planar(g);
  } else {
    std::vector<double> km, kp;
    graph_curvature_axisym(g, km, kp);
    for (int i = 0; i <= n; ++i) h[i] = 0.5 * (km[i] + kp[i]);
  }
  // dsigma-average of H and the relative deviation as the residual
  const std::vector<double> arc = arc_factor(g);
  std::vector<double> num(n + 1), den(n + 1);
  for (int i = 0; i <= n; ++i) {
    const double wmeas =
        g.cone.planar2d() ? arc[i] : 2.0 * kPi * g.rho[i] * std::sin(g.theta(i)) * arc[i];
    num[i] = h[i] * wmeas;
    den[i] = wmeas;
  }
  const double hbar = simpson_on_grid(num, g.dtheta()) / simpson_on_grid(den, g.dtheta());
  double dev = 0.0;
  for (int i = 0; i <= n; ++i) dev = std::max(dev, std::abs(h[i] - hbar));
  ev.residual = dev / std::abs(hbar);
  // dP = int (N-1) H <V,nu> dsigma = int G w dtheta
  const std::vector<double> meas = normal_speed_measure_factor(g);
  ev.gradient_density.resize(n + 1);
  ev.descent_normal_speed.resize(n + 1);
  for (int i = 0; i <= n; ++i) {
    ev.gradient_density[i] = (g.cone.dimension() - 1) * h[i] * meas[i];
    ev.descent_normal_speed[i] = -(h[i] - hbar);
  }
  return ev;
}

PolarGraph renormalize_volume(const PolarGraph& g, double target) {
  const double v = volume(g);
  const double f = std::pow(target / v, 1.0 / g.cone.dimension());
  return g.scaled(f);
}

FlowState run_flow(const PolarGraph& g0, const FlowParams& params,
                   const std::function<ObjectiveEval(const PolarGraph&)>& eval) {
  PolarGraph g = renormalize_volume(g0, params.target_volume);
  FlowState state;
  state.status = FlowStatus::StepLimit;
  ObjectiveEval cur = eval(g);
  auto record = [&](int step) {
    state.history.push_back({step, cur.value, cur.residual, volume(g), g.min_rho(), g.max_rho()});
  };
  record(0);

  double tau = params.step_size;
  const double dt = g.dtheta();
  for (int step = 1; step <= params.max_steps; ++step) {
    if (cur.residual <= params.residual_tol) {
      state.status = FlowStatus::Converged;
      break;
    }
    // descent direction: the negative shape gradient as a normal speed,
    // converted to a graph speed, smoothed once, max-normalized and
    // volume-projected
    const std::vector<double> arc = arc_factor(g);
    std::vector<double> w(g.rho.size());
    for (std::size_t i = 0; i < w.size(); ++i)
      w[i] = cur.descent_normal_speed[i] * arc[i] / g.rho[i];
    w = smooth_once(w);
    double wmax = 0.0;
    for (double v : w) wmax = std::max(wmax, std::abs(v));
    if (wmax > 0.0)
      for (double& v : w) v /= wmax;
    const DeformationField d = project_volume_preserving(w, g);

    // directional derivative int G w dtheta for the Armijo test
    std::vector<double> gw(g.rho.size());
    for (std::size_t i = 0; i < gw.size(); ++i) gw[i] = cur.gradient_density[i] * d.graph_speed[i];
    const double dd = simpson_on_grid(gw, dt);
    if (!(dd < 0.0)) {
      state.status = cur.residual <= params.stall_residual_factor * params.residual_tol
                         ? FlowStatus::Stalled
                         : FlowStatus::StepLimit;
      if (state.status == FlowStatus::StepLimit)
        throw StepFailure("no descent direction away from the discrete floor");
      break;
    }

    tau = std::min(2.0 * tau, params.step_size);
    bool accepted = false;
    for (int half = 0; half <= params.max_halvings; ++half) {
      PolarGraph trial = g;
      for (std::size_t i = 0; i < trial.rho.size(); ++i) trial.rho[i] += tau * d.graph_speed[i];
      if (trial.min_rho() <= params.min_rho_factor * trial.max_rho()) {
        tau *= 0.5;
        continue;
      }
      trial = renormalize_volume(trial, params.target_volume);
      ObjectiveEval trial_eval = eval(trial);
      if (trial_eval.value <= cur.value + params.armijo * tau * dd) {
        g = std::move(trial);
        cur = std::move(trial_eval);
        accepted = true;
        break;
      }
      tau *= 0.5;
    }
    if (!accepted) {
      if (cur.residual <= params.stall_residual_factor * params.residual_tol) {
        state.status = FlowStatus::Stalled;
        break;
      }
      throw StepFailure("line search could not decrease the objective");
    }
    state.step = step;
    record(step);
    if (cur.residual <= params.residual_tol) {
      state.status = FlowStatus::Converged;
      break;
    }
  }
  if (state.status == FlowStatus::StepLimit && cur.residual <= params.residual_tol)
    state.status = FlowStatus::Converged;
  state.graph = g;
  state.volume_drift = std::abs(volume(g) - params.target_volume);
  return state;
}

}  // namespace

std::vector<double> FlowState::energy_history() const {
  std::vector<double> v;
  for (const auto& r : history) v.push_back(r.objective);
  return v;
}

std::vector<double> FlowState::residual_history() const {
  std::vector<double> v;
  for (const auto& r : history) v.push_back(r.residual);
  return v;
}

DeformationField graph_deformation(const std::vector<double>& w, const PolarGraph& g) {
  g.validate();
  if (w.size() != g.rho.size())
    throw std::invalid_argument("deformation speed needs one sample per rho grid point");
  DeformationField d;
  d.graph_speed = w;
  const std::vector<double> arc = arc_factor(g);
  d.normal_speed.resize(w.size());
  for (std::size_t i = 0; i < w.size(); ++i) d.normal_speed[i] = w[i] * g.rho[i] / arc[i];
  d.volume_preserving = false;
  return d;
}

DeformationField project_volume_preserving(const std::vector<double>& w, const PolarGraph& g) {
  g.validate();
  if (w.size() != g.rho.size())
    throw std::invalid_argument("deformation speed needs one sample per rho grid point");
  const int n = g.n_theta();
  const std::vector<double> arc = arc_factor(g);
  // mean of the normal speed over Gamma: int <V,nu> dsigma / int dsigma
  std::vector<double> num(n + 1), den(n + 1);
  const std::vector<double> meas = normal_speed_measure_factor(g);
  for (int i = 0; i <= n; ++i) {
    num[i] = w[i] * meas[i];
    den[i] = g.cone.planar2d() ? arc[i]
                               : 2.0 * kPi * g.rho[i] * std::sin(g.theta(i)) * arc[i];
  }
  const double mean = simpson_on_grid(num, g.dtheta()) / simpson_on_grid(den, g.dtheta());
  DeformationField d;
  d.graph_speed.resize(w.size());
  for (int i = 0; i <= n; ++i) d.graph_speed[i] = w[i] - mean * arc[i] / g.rho[i];
  d.normal_speed.resize(w.size());
  for (int i = 0; i <= n; ++i) d.normal_speed[i] = d.graph_speed[i] * g.rho[i] / arc[i];
  d.volume_preserving = true;
  return d;
}

double shape_derivative(const PolarGraph& g, const DeformationField& d,
                        const MeshParams& mesh_params, double solver_tol) {
  g.validate();
  auto mesh = std::make_shared<const SectorMesh>(generate_mesh(g, mesh_params));
  const FemField u = solve_torsion(mesh, solver_tol);
  const std::vector<FluxSample> flux = boundary_flux(u);
  // normal speed sampled on the rho grid, interpolated at facet midpoints
  std::vector<double> gth(g.rho.size());
  for (int i = 0; i <= g.n_theta(); ++i) gth[i] = g.theta(i);
  double total = 0.0;
  for (const auto& s : flux) {
    const double vn = interp_samples(gth, d.normal_speed, s.theta);
    total += -0.5 * s.value * s.value * vn * s.measure;
  }
  return total;
}

double overdetermined_residual(const PolarGraph& g, const MeshParams& mesh_params,
                               double solver_tol) {
  g.validate();
  auto mesh = std::make_shared<const SectorMesh>(generate_mesh(g, mesh_params));
  const TorsionReport rep = torsional_energy(std::move(mesh), solver_tol);
  return rep.flux_deviation / rep.flux_mean;
}

FlowState flow_torsion(const PolarGraph& g0, const FlowParams& params) {
  g0.validate();
  return run_flow(g0, params, [&params](const PolarGraph& g) { return eval_torsion(g, params); });
}

FlowState flow_perimeter(const PolarGraph& g0, const FlowParams& params) {
  g0.validate();
  return run_flow(g0, params,
                  [&params](const PolarGraph& g) { return eval_perimeter(g, params); });
}

std::vector<double> graph_curvature_planar(const PolarGraph& g) {
  const int n = g.n_theta();
  const std::vector<double> d1 = profile_derivative(g);
  const std::vector<double> d2 = second_derivative(g.rho, g.dtheta());
  std::vector<double> k(n + 1);
  for (int i = 0; i <= n; ++i) {
    const double r = g.rho[i];
    const double denom = std::pow(r * r + d1[i] * d1[i], 1.5);
    k[i] = (r * r + 2.0 * d1[i] * d1[i] - r * d2[i]) / denom;
  }
  return k;
}

void graph_curvature_axisym(const PolarGraph& g, std::vector<double>& k_meridian,
                            std::vector<double>& k_parallel) {
  const int n = g.n_theta();
  const std::vector<double> d1 = profile_derivative(g);
  const std::vector<double> d2 = second_derivative(g.rho, g.dtheta());
  k_meridian.resize(n + 1);
  k_parallel.resize(n + 1);
  for (int i = 0; i <= n; ++i) {
    const double r = g.rho[i];
    const double arc2 = r * r + d1[i] * d1[i];
    k_meridian[i] = (r * r + 2.0 * d1[i] * d1[i] - r * d2[i]) / std::pow(arc2, 1.5);
    const double st = std::sin(g.theta(i));
    if (i == 0) {
      // pole: for a meridian meeting the axis regularly the parallel
      // curvature tends to the meridian one
      k_parallel[i] = k_meridian[i];
    } else {
      k_parallel[i] = (r * st - d1[i] * std::cos(g.theta(i))) / (r * st * std::sqrt(arc2));
    }
  }
}

}  // namespace conetorsion
