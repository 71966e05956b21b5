// Batch experiment runner: every toolkit capability behind one binary with
// JSON configs and CSV/JSON outputs. Deterministic for a fixed (config, seed).

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "conetorsion/cmc.hpp"
#include "conetorsion/errors.hpp"
#include "conetorsion/fem.hpp"
#include "conetorsion/format.hpp"
#include "conetorsion/geometry.hpp"
#include "conetorsion/io.hpp"
#include "conetorsion/log.hpp"
#include "conetorsion/mesh.hpp"
#include "conetorsion/parallel.hpp"
#include "conetorsion/rng.hpp"
#include "conetorsion/shapeflow.hpp"
#include "conetorsion/symmetrize.hpp"

namespace ct = conetorsion;
using nlohmann::json;

namespace {

const json& require(const json& j, const char* field) {
  if (!j.contains(field)) throw ct::ConfigError(std::string("missing field: ") + field);
  return j.at(field);
}

template <class T>
T get_or(const json& j, const char* field, T fallback) {
  if (!j.contains(field)) return fallback;
  return j.at(field).get<T>();
}

ct::ConeSpec parse_cone(const json& cfg) {
  const json& jc = require(cfg, "cone");
  const std::string kind = require(jc, "kind").get<std::string>();
  const double aperture = require(jc, "aperture").get<double>();
  ct::ConeSpec cone;
  if (kind == "planar")
    cone = ct::ConeSpec::planar(aperture);
  else if (kind == "axisym")
    cone = ct::ConeSpec::axisym(aperture);
  else
    throw ct::ConfigError("cone.kind must be \"planar\" or \"axisym\"");
  try {
    cone.validate();
  } catch (const std::invalid_argument& e) {
    throw ct::ConfigError(e.what());
  }
  return cone;
}

ct::PolarGraph parse_profile(const json& cfg, const ct::ConeSpec& cone, std::uint64_t seed) {
  const json& jp = require(cfg, "profile");
  const int n_theta = get_or<int>(jp, "n_theta", 128);
  ct::PolarGraph g;
  if (jp.contains("constant")) {
    g = ct::sector_graph(cone, jp.at("constant").get<double>(), n_theta);
  } else if (jp.contains("fourier")) {
    const json& jf = jp.at("fourier");
    const double base = get_or<double>(jf, "base_radius", 1.0);
    const std::vector<double> coeff = require(jf, "coefficients").get<std::vector<double>>();
    g.cone = cone;
    g.rho.resize(n_theta + 1);
    for (int i = 0; i <= n_theta; ++i) {
      const double th = cone.aperture * i / n_theta;
      double s = 1.0;
      for (std::size_t k = 0; k < coeff.size(); ++k)
        s += coeff[k] * std::cos((k + 1) * M_PI * th / cone.aperture);
      g.rho[i] = base * s;
    }
  } else if (jp.contains("random")) {
    const json& jr = jp.at("random");
    g = ct::random_profile(cone, n_theta, seed, get_or<double>(jr, "base_radius", 1.0),
                           get_or<int>(jr, "k_max", 6), get_or<double>(jr, "amplitude", 0.15));
  } else if (jp.contains("file")) {
    std::ifstream in(jp.at("file").get<std::string>());
    if (!in) throw ct::ConfigError("cannot open profile file");
    std::stringstream ss;
    ss << in.rdbuf();
    g = ct::polar_graph_from_json(ss.str());
  } else {
    throw ct::ConfigError("profile needs one of: constant, fourier, random, file");
  }
  try {
    g.validate();
  } catch (const std::invalid_argument& e) {
    throw ct::ConfigError(e.what());
  }
  if (get_or<bool>(jp, "unit_volume", false)) {
    const double v = ct::volume(g);
    g = g.scaled(std::pow(1.0 / v, 1.0 / cone.dimension()));
  }
  return g;
}

ct::MeshParams parse_mesh(const json& cfg) {
  ct::MeshParams mp;
  if (cfg.contains("mesh")) {
    const json& jm = cfg.at("mesh");
    mp.target_h = get_or<double>(jm, "h", mp.target_h);
    mp.grading_exponent = get_or<double>(jm, "grading", mp.grading_exponent);
    mp.max_elements = get_or<std::int64_t>(jm, "max_elements", mp.max_elements);
  }
  if (!(mp.target_h > 0.0)) throw ct::ConfigError("mesh.h must be positive");
  return mp;
}

double parse_solver_tol(const json& cfg) {
  const double tol = get_or<double>(cfg, "solver_tol", 1e-10);
  if (!(tol > 0.0)) throw ct::ConfigError("solver_tol must be positive");
  return tol;
}

void write_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw ct::ConfigError("cannot write output file " + path.string());
  os << content;
}

json flow_params_json(const ct::FlowParams& fp) {
  return json{{"max_steps", fp.max_steps},
              {"step_size", fp.step_size},
              {"residual_tol", fp.residual_tol},
              {"mesh_h", fp.mesh.target_h},
              {"grading", fp.mesh.grading_exponent},
              {"solver_tol", fp.solver_tol}};
}

ct::FlowParams parse_flow_params(const json& cfg) {
  ct::FlowParams fp;
  fp.mesh = parse_mesh(cfg);
  fp.solver_tol = parse_solver_tol(cfg);
  fp.max_steps = get_or<int>(cfg, "steps", 80);
  fp.step_size = get_or<double>(cfg, "step_size", 0.5);
  fp.residual_tol = get_or<double>(cfg, "residual_tol", 1e-3);
  if (!(fp.residual_tol > 0.0)) throw ct::ConfigError("residual_tol must be positive");
  return fp;
}

const char* status_name(ct::FlowStatus s) {
  switch (s) {
    case ct::FlowStatus::Converged: return "converged";
    case ct::FlowStatus::Stalled: return "stalled";
    default: return "step_limit";
  }
}

// ---- subcommands ----

int cmd_solve(const json& cfg, const std::filesystem::path& out, std::uint64_t seed) {
  const ct::ConeSpec cone = parse_cone(cfg);
  const ct::PolarGraph g = parse_profile(cfg, cone, seed);
  const ct::MeshParams mp = parse_mesh(cfg);
  const double tol = parse_solver_tol(cfg);
  auto mesh = std::make_shared<const ct::SectorMesh>(ct::generate_mesh(g, mp));
  ct::log_info("solve: %d vertices, %d elements", mesh->n_vertices(), mesh->n_elements());
  const ct::FemField u = ct::solve_torsion(mesh, tol);
  ct::TorsionReport rep = ct::report_from_solution(u);
  write_file(out / "report.json", ct::torsion_report_to_json(rep));
  std::ostringstream field;
  ct::write_fem_field_text(u, field);
  write_file(out / "field.txt", field.str());
  if (get_or<bool>(cfg, "write_mesh", false)) {
    std::ostringstream ms;
    ct::write_mesh_text(*mesh, ms);
    write_file(out / "mesh.txt", ms.str());
  }
  return 0;
}

int cmd_flow(const json& cfg, const std::filesystem::path& out, std::uint64_t seed) {
  const ct::ConeSpec cone = parse_cone(cfg);
  const ct::PolarGraph g0 = parse_profile(cfg, cone, seed);
  const ct::FlowParams fp = parse_flow_params(cfg);
  const std::string functional = get_or<std::string>(cfg, "functional", "torsion");
  ct::FlowState st;
  if (functional == "torsion")
    st = ct::flow_torsion(g0, fp);
  else if (functional == "perimeter")
    st = ct::flow_perimeter(g0, fp);
  else
    throw ct::ConfigError("functional must be \"torsion\" or \"perimeter\"");
  std::ostringstream csv;
  ct::write_flow_history_csv(st, csv);
  write_file(out / "flow.csv", csv.str());
  write_file(out / "final_profile.json", ct::polar_graph_to_json(st.graph));
  json j{{"functional", functional},
         {"status", status_name(st.status)},
         {"steps", st.step},
         {"final_objective", st.history.back().objective},
         {"final_residual", st.history.back().residual},
         {"isoperimetric_gap", ct::isoperimetric_gap(st.graph)},
         {"volume_drift", st.volume_drift},
         {"params", flow_params_json(fp)}};
  write_file(out / "flow_summary.json", j.dump(2) + "\n");
  return 0;
}

int cmd_symmetrize(const json& cfg, const std::filesystem::path& out, std::uint64_t seed) {
  const ct::ConeSpec cone = parse_cone(cfg);
  const ct::PolarGraph g = parse_profile(cfg, cone, seed);
  const ct::MeshParams mp = parse_mesh(cfg);
  const double tol = parse_solver_tol(cfg);
  const int n_bins = get_or<int>(cfg, "n_bins", 4096);
  const std::vector<double> ps = get_or<std::vector<double>>(cfg, "p_values", {1.0, 2.0});

  auto mesh = std::make_shared<const ct::SectorMesh>(ct::generate_mesh(g, mp));
  const ct::FemField u = ct::solve_torsion(mesh, tol);
  const ct::RearrangedProfile r = ct::decreasing_rearrangement(u, n_bins);
  std::ostringstream csv;
  ct::write_rearranged_profile_csv(r, csv);
  write_file(out / "rearrangement.csv", csv.str());

  json j;
  j["n_bins"] = n_bins;
  j["total_measure"] = r.total_measure;
  j["max_value"] = r.values.front();
  json gaps = json::object();
  json lp = json::object();
  for (double p : ps) {
    gaps[ct::format_double(p)] = ct::polya_szego_gap(u, p, n_bins);
    const double direct = ct::integrate_abs_power(u, p);
    const double rearranged = ct::rearranged_p_integral(r, p);
    lp[ct::format_double(p)] = json{{"domain_integral", direct},
                                    {"rearranged_integral", rearranged},
                                    {"relative_error",
                                     std::abs(direct - rearranged) / std::abs(direct)}};
  }
  j["polya_szego_gap"] = gaps;
  j["lp_preservation"] = lp;
  write_file(out / "symmetrize.json", j.dump(2) + "\n");
  return 0;
}

int cmd_isoperimetric(const json& cfg, const std::filesystem::path& out, std::uint64_t seed) {
  const ct::ConeSpec cone = parse_cone(cfg);
  const ct::PolarGraph g = parse_profile(cfg, cone, seed);
  const ct::PolarGraph sector = ct::sector_of_same_volume(g);
  json j{{"volume", ct::volume(g)},
         {"relative_perimeter", ct::relative_perimeter(g)},
         {"isoperimetric_gap", ct::isoperimetric_gap(g)},
         {"sector_radius", sector.rho.front()},
         {"omega_measure", cone.omega_measure()}};
  write_file(out / "isoperimetric.json", j.dump(2) + "\n");
  return 0;
}

int cmd_cmc(const json& cfg, const std::filesystem::path& out, std::uint64_t seed) {
  const int n = get_or<int>(cfg, "samples", 2048);
  const double tol_residual = get_or<double>(cfg, "tolerance", 1e-4);
  const double tol_center = get_or<double>(cfg, "center_tolerance", 1e-8);

  json surfaces = json::array();
  bool all_pass = true;
  auto push = [&](const std::string& name, const ct::CurveGamma& c, bool expect_vertex,
                  bool expect_wall) {
    json s{{"name", name}};
    const double defect = ct::orthogonality_defect(c);
    const double m1 = ct::minkowski1_residual(c);
    s["orthogonality_defect"] = defect;
    s["minkowski1_residual"] = m1;
    bool pass = std::abs(m1) <= tol_residual && defect <= tol_residual;
    if (!c.cone.planar2d()) {
      const ct::UmbilicityReport ur = ct::umbilicity_gap(c);
      s["umbilicity_gap"] = ur.gap;
      s["minkowski2_residual"] = ur.minkowski2_residual;
      pass = pass && ur.gap <= tol_residual && std::abs(ur.minkowski2_residual) <= tol_residual;
    }
    const ct::CenterReport cr = ct::locate_center(c);
    s["center"] = {cr.fit.center[0], cr.fit.center[1]};
    s["radius"] = cr.fit.radius;
    s["fit_residual"] = cr.fit.max_fit_residual;
    s["classification"] = cr.classification == ct::CenterClass::Vertex  ? "VERTEX"
                          : cr.classification == ct::CenterClass::Wall ? "WALL"
                                                                        : "NEITHER";
    s["admissible"] = cr.admissible;
    if (expect_vertex) {
      const double pnorm = std::hypot(cr.fit.center[0], cr.fit.center[1]);
      pass = pass && cr.classification == ct::CenterClass::Vertex && pnorm <= tol_center;
    }
    if (expect_wall) pass = pass && cr.classification == ct::CenterClass::Wall;
    s["pass"] = pass;
    all_pass = all_pass && pass;
    surfaces.push_back(s);
  };

  for (double alpha : {M_PI / 4.0, M_PI / 2.0, 3.0 * M_PI / 4.0}) {
    std::ostringstream name;
    name << "planar_arc_alpha_" << ct::format_double(alpha);
    push(name.str(), ct::arc_about_vertex(ct::ConeSpec::planar(alpha), 1.0, n), true, false);
  }
  for (double beta : {M_PI / 4.0, M_PI / 3.0}) {
    std::ostringstream name;
    name << "spherical_cap_beta_" << ct::format_double(beta);
    push(name.str(), ct::spherical_cap(ct::ConeSpec::axisym(beta), 1.0, n), true, false);
  }
  push("half_circle_on_wall", ct::half_circle_on_wall(1.0, 0.6, n), false, true);
  {
    // noisy vertex arc: fitted center must stay near O
    ct::CurveGamma c = ct::arc_about_vertex(ct::ConeSpec::planar(M_PI / 2.0), 1.0, n);
    ct::Rng rng(seed);
    for (auto& p : c.points) {
      p[0] += rng.uniform(-1e-6, 1e-6);
      p[1] += rng.uniform(-1e-6, 1e-6);
    }
    json s{{"name", "noisy_vertex_arc"}};
    const ct::CenterReport cr = ct::locate_center(c);
    const double pnorm = std::hypot(cr.fit.center[0], cr.fit.center[1]);
    s["center_norm"] = pnorm;
    s["classification"] = cr.classification == ct::CenterClass::Vertex ? "VERTEX" : "OTHER";
    const bool pass = cr.classification == ct::CenterClass::Vertex && pnorm <= 1e-5;
    s["pass"] = pass;
    all_pass = all_pass && pass;
    surfaces.push_back(s);
  }

  json j{{"samples", n},
         {"tolerance", tol_residual},
         {"center_tolerance", tol_center},
         {"surfaces", surfaces},
         {"all_pass", all_pass}};
  write_file(out / "cmc.json", j.dump(2) + "\n");
  if (!all_pass) throw ct::NumericalError("cmc suite has failing surfaces");
  return 0;
}

int cmd_sweep(const json& cfg, const std::filesystem::path& out, std::uint64_t seed) {
  const std::vector<double> alphas = require(cfg, "alphas").get<std::vector<double>>();
  if (alphas.empty()) throw ct::ConfigError("alphas must be nonempty");
  const std::string functional = get_or<std::string>(cfg, "functional", "perimeter");
  if (functional != "torsion" && functional != "perimeter")
    throw ct::ConfigError("functional must be \"torsion\" or \"perimeter\"");
  const ct::FlowParams fp = parse_flow_params(cfg);
  const int n_theta = get_or<int>(cfg, "n_theta", 128);

  struct Row {
    double alpha;
    double objective;
    double residual;
    double gap;
    int steps;
    std::string status;
    std::string error;
  };
  std::vector<Row> rows(alphas.size());
  // one trajectory per worker; rows land in sweep-index order regardless of
  // schedule
  ct::parallel_for(static_cast<std::ptrdiff_t>(alphas.size()), [&](std::ptrdiff_t i) {
    Row& row = rows[static_cast<std::size_t>(i)];
    row.alpha = alphas[static_cast<std::size_t>(i)];
    try {
      const ct::ConeSpec cone = ct::ConeSpec::planar(row.alpha);
      ct::PolarGraph g0 =
          ct::random_profile(cone, n_theta, seed + static_cast<std::uint64_t>(i));
      const ct::FlowState st = functional == "torsion" ? ct::flow_torsion(g0, fp)
                                                       : ct::flow_perimeter(g0, fp);
      row.objective = st.history.back().objective;
      row.residual = st.history.back().residual;
      row.gap = ct::isoperimetric_gap(st.graph);
      row.steps = st.step;
      row.status = status_name(st.status);
    } catch (const std::exception& e) {
      row.status = "error";
      row.error = e.what();
    }
  });

  std::ostringstream csv;
  csv << "alpha,objective,residual,isoperimetric_gap,steps,status\n";
  for (const Row& r : rows) {
    if (r.status == "error")
      csv << ct::format_double(r.alpha) << ",,,,," << "error\n";
    else
      csv << ct::format_double(r.alpha) << ',' << ct::format_double(r.objective) << ','
          << ct::format_double(r.residual) << ',' << ct::format_double(r.gap) << ',' << r.steps
          << ',' << r.status << '\n';
  }
  write_file(out / "sweep.csv", csv.str());
  for (const Row& r : rows)
    if (r.status == "error") throw ct::NumericalError("sweep trajectory failed: " + r.error);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"torsion and shape-optimization experiments in cones"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir = ".";
  std::uint64_t seed = 0;
  int threads = 0;
  app.add_option("--config", config_path, "JSON config file")->required();
  app.add_option("--out", out_dir, "output directory");
  app.add_option("--seed", seed, "RNG seed");
  app.add_option("--threads", threads, "worker thread count (0 = library default)");

  for (const char* name :
       {"solve", "flow", "symmetrize", "isoperimetric", "cmc", "sweep"})
    app.add_subcommand(name);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 1;
  }

  try {
    ct::set_threads(threads);
    std::ifstream in(config_path);
    if (!in) throw ct::ConfigError("cannot open config file " + config_path);
    json cfg;
    try {
      cfg = json::parse(in);
    } catch (const json::exception& e) {
      throw ct::ConfigError(std::string("invalid config JSON: ") + e.what());
    }
    const std::filesystem::path out(out_dir);
    std::filesystem::create_directories(out);
    const std::string sub = app.get_subcommands().front()->get_name();
    if (sub == "solve") return cmd_solve(cfg, out, seed);
    if (sub == "flow") return cmd_flow(cfg, out, seed);
    if (sub == "symmetrize") return cmd_symmetrize(cfg, out, seed);
    if (sub == "isoperimetric") return cmd_isoperimetric(cfg, out, seed);
    if (sub == "cmc") return cmd_cmc(cfg, out, seed);
    if (sub == "sweep") return cmd_sweep(cfg, out, seed);
    throw ct::ConfigError("unknown subcommand");
  } catch (const ct::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 1;
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 1;
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return 2;
  }
}
