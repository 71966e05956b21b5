#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>
#include <string>

#include <json.hpp>

namespace fs = std::filesystem;
using nlohmann::json;
using std::numbers::pi;

namespace {

struct RunResult {
  int exit_code;
  std::string stderr_text;
};

RunResult run(const std::string& args, const fs::path& dir) {
  const fs::path errfile = dir / "stderr.txt";
  const std::string cmd =
      std::string(CONE_TORSION_BIN) + " " + args + " 2> " + errfile.string();
  const int raw = std::system(cmd.c_str());
  std::ifstream err(errfile);
  std::stringstream ss;
  ss << err.rdbuf();
  return {WEXITSTATUS(raw), ss.str()};
}

fs::path fresh_dir(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("cone_torsion_test_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

void write_config(const fs::path& path, const json& j) {
  std::ofstream os(path);
  os << j.dump(2);
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("solve: sector energy lands on the analytic value and runs are byte-identical") {
  const fs::path dir = fresh_dir("solve");
  const json cfg = {{"cone", {{"kind", "planar"}, {"aperture", pi / 2.0}}},
                    {"profile", {{"constant", 1.0}, {"n_theta", 64}}},
                    {"mesh", {{"h", 0.02}}},
                    {"solver_tol", 1e-10}};
  write_config(dir / "cfg.json", cfg);
  const fs::path out1 = dir / "out1", out2 = dir / "out2";
  CHECK(run("solve --config " + (dir / "cfg.json").string() + " --out " + out1.string(), dir)
            .exit_code == 0);
  CHECK(run("solve --config " + (dir / "cfg.json").string() + " --out " + out2.string(), dir)
            .exit_code == 0);
  const json rep = json::parse(slurp(out1 / "report.json"));
  CHECK(std::abs(rep["energy_T"].get<double>() - (-pi / 64.0)) < 5e-5);
  CHECK(std::abs(rep["flux_mean"].get<double>() - 0.5) < 1e-3);
  // determinism contract
  CHECK(slurp(out1 / "report.json") == slurp(out2 / "report.json"));
  CHECK(slurp(out1 / "field.txt") == slurp(out2 / "field.txt"));
  CHECK(!slurp(out1 / "field.txt").empty());
}

TEST_CASE("solve: missing aperture exits 1 and names the field") {
  const fs::path dir = fresh_dir("badcfg");
  write_config(dir / "cfg.json", {{"cone", {{"kind", "planar"}}},
                                  {"profile", {{"constant", 1.0}}}});
  const RunResult r =
      run("solve --config " + (dir / "cfg.json").string() + " --out " + dir.string(), dir);
  CHECK(r.exit_code == 1);
  CHECK(r.stderr_text.find("aperture") != std::string::npos);
}

TEST_CASE("solve: numerical failure exits 2") {
  const fs::path dir = fresh_dir("numfail");
  const json cfg = {{"cone", {{"kind", "planar"}, {"aperture", pi / 2.0}}},
                    {"profile", {{"constant", 1.0}, {"n_theta", 64}}},
                    {"mesh", {{"h", 0.02}, {"max_elements", 10}}}};
  write_config(dir / "cfg.json", cfg);
  const RunResult r =
      run("solve --config " + (dir / "cfg.json").string() + " --out " + dir.string(), dir);
  CHECK(r.exit_code == 2);
}

TEST_CASE("flow: perimeter flow from a sector start converges in zero steps") {
  const fs::path dir = fresh_dir("flowsector");
  const json cfg = {{"cone", {{"kind", "planar"}, {"aperture", pi / 2.0}}},
                    {"profile", {{"constant", 1.0}, {"n_theta", 128}}},
                    {"functional", "perimeter"},
                    {"steps", 50},
                    {"step_size", 1e-3},
                    {"residual_tol", 1e-6},
                    {"mesh", {{"h", 0.05}}}};
  write_config(dir / "cfg.json", cfg);
  CHECK(run("flow --config " + (dir / "cfg.json").string() + " --out " + dir.string(), dir)
            .exit_code == 0);
  const json summary = json::parse(slurp(dir / "flow_summary.json"));
  CHECK(summary["steps"].get<int>() == 0);
  CHECK(summary["status"].get<std::string>() == "converged");
  CHECK(slurp(dir / "flow.csv").rfind("step,T,residual,volume,min_rho,max_rho\n", 0) == 0);
}

TEST_CASE("flow: torsion flow from a perturbed start reaches a small residual") {
  const fs::path dir = fresh_dir("flowtorsion");
  const json cfg = {{"cone", {{"kind", "planar"}, {"aperture", pi / 2.0}}},
                    {"profile",
                     {{"fourier", {{"base_radius", 1.0}, {"coefficients", {0.0, 0.08}}}},
                      {"n_theta", 96},
                      {"unit_volume", true}}},
                    {"functional", "torsion"},
                    {"steps", 50},
                    {"step_size", 0.5},
                    {"residual_tol", 1e-3},
                    {"mesh", {{"h", 0.03}}}};
  write_config(dir / "cfg.json", cfg);
  CHECK(run("flow --config " + (dir / "cfg.json").string() + " --out " + dir.string(), dir)
            .exit_code == 0);
  const json summary = json::parse(slurp(dir / "flow_summary.json"));
  CHECK(summary["final_residual"].get<double>() <= 1e-3);
  // final profile round-trips as a polar graph
  const json prof = json::parse(slurp(dir / "final_profile.json"));
  CHECK(prof["kind"] == "planar");
}

TEST_CASE("symmetrize: sector solution reports a near-zero Polya-Szego gap") {
  const fs::path dir = fresh_dir("symmetrize");
  const json cfg = {{"cone", {{"kind", "planar"}, {"aperture", pi / 2.0}}},
                    {"profile", {{"constant", 1.0}, {"n_theta", 64}}},
                    {"mesh", {{"h", 0.02}}},
                    {"p_values", {1.0, 2.0}}};
  write_config(dir / "cfg.json", cfg);
  CHECK(run("symmetrize --config " + (dir / "cfg.json").string() + " --out " + dir.string(), dir)
            .exit_code == 0);
  const json rep = json::parse(slurp(dir / "symmetrize.json"));
  CHECK(std::abs(rep["polya_szego_gap"]["2"].get<double>()) < 1e-4);
  CHECK(rep["lp_preservation"]["2"]["relative_error"].get<double>() < 1e-5);
  CHECK(slurp(dir / "rearrangement.csv").rfind("s,u_sharp\n", 0) == 0);
}

TEST_CASE("isoperimetric: sector reports zero gap") {
  const fs::path dir = fresh_dir("iso");
  const json cfg = {{"cone", {{"kind", "planar"}, {"aperture", pi / 2.0}}},
                    {"profile", {{"constant", 1.0}, {"n_theta", 64}}}};
  write_config(dir / "cfg.json", cfg);
  CHECK(run("isoperimetric --config " + (dir / "cfg.json").string() + " --out " + dir.string(),
            dir)
            .exit_code == 0);
  const json rep = json::parse(slurp(dir / "isoperimetric.json"));
  CHECK(std::abs(rep["isoperimetric_gap"].get<double>()) < 1e-8);
}

TEST_CASE("cmc: the bundled surface suite passes and is deterministic") {
  const fs::path dir = fresh_dir("cmc");
  write_config(dir / "cfg.json", {{"samples", 1024}});
  const std::string args = "cmc --config " + (dir / "cfg.json").string() + " --seed 7 --out ";
  CHECK(run(args + (dir / "a").string(), dir).exit_code == 0);
  CHECK(run(args + (dir / "b").string(), dir).exit_code == 0);
  const json rep = json::parse(slurp(dir / "a" / "cmc.json"));
  CHECK(rep["all_pass"].get<bool>());
  CHECK(slurp(dir / "a" / "cmc.json") == slurp(dir / "b" / "cmc.json"));
}

TEST_CASE("sweep: one row per alpha, in order") {
  const fs::path dir = fresh_dir("sweep");
  const json cfg = {{"alphas", {pi / 3.0, pi / 2.0, 2.0}},
                    {"functional", "perimeter"},
                    {"steps", 800},
                    {"step_size", 2e-3},
                    {"residual_tol", 1e-4},
                    {"n_theta", 96}};
  write_config(dir / "cfg.json", cfg);
  CHECK(run("sweep --config " + (dir / "cfg.json").string() + " --seed 3 --threads 3 --out " +
                dir.string(),
            dir)
            .exit_code == 0);
  const std::string csv = slurp(dir / "sweep.csv");
  std::istringstream is(csv);
  std::string line;
  std::getline(is, line);
  CHECK(line == "alpha,objective,residual,isoperimetric_gap,steps,status");
  int rows = 0;
  double prev_alpha = 0.0;
  while (std::getline(is, line)) {
    const double alpha = std::stod(line.substr(0, line.find(',')));
    CHECK(alpha > prev_alpha);
    prev_alpha = alpha;
    ++rows;
  }
  CHECK(rows == 3);
}
