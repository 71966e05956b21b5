#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>

#include "conetorsion/fem.hpp"
#include "conetorsion/geometry.hpp"
#include "conetorsion/parallel.hpp"
#include "conetorsion/rng.hpp"
#include "conetorsion/symmetrize.hpp"
#include "oracle_helpers.hpp"

namespace ct = conetorsion;
using std::numbers::pi;

TEST_CASE("deterministic_sum matches the serial reference bitwise") {
  auto f = [](std::ptrdiff_t i) { return std::sin(0.001 * static_cast<double>(i)); };
  for (std::ptrdiff_t n : {0l, 1l, 100l, 2048l, 2049l, 100000l}) {
    CHECK(ct::deterministic_sum(n, f) == ct::serial_deterministic_sum(n, f));
  }
}

TEST_CASE("deterministic_sum is independent of the thread count") {
  auto f = [](std::ptrdiff_t i) { return 1.0 / (1.0 + static_cast<double>(i)); };
  const int original = ct::max_threads();
  const double ref = ct::serial_deterministic_sum(100001, f);
  for (int t : {1, 2, 3, 7}) {
    ct::set_threads(t);
    CHECK(ct::deterministic_sum(100001, f) == ref);
  }
  ct::set_threads(original);
}

TEST_CASE("assembly: OpenMP and serial paths agree bitwise") {
  for (const ct::ConeSpec cone : {ct::ConeSpec::planar(1.9), ct::ConeSpec::axisym(0.7)}) {
    const ct::PolarGraph g = ct::random_profile(cone, 96, 13);
    const auto mesh = oracle::make_mesh(g, 0.05);
    const ct::AssembledSystem a = ct::assemble_poisson(*mesh);
    const ct::AssembledSystem b = ct::assemble_poisson_serial(*mesh);
    CHECK(a.stiffness.values == b.stiffness.values);
    CHECK(a.stiffness.col_idx == b.stiffness.col_idx);
    CHECK(a.load == b.load);
  }
}

TEST_CASE("spmv: OpenMP and serial paths agree bitwise") {
  const ct::PolarGraph g = ct::random_profile(ct::ConeSpec::planar(2.4), 96, 29);
  const auto mesh = oracle::make_mesh(g, 0.05);
  const ct::AssembledSystem sys = ct::assemble_poisson(*mesh);
  std::vector<double> x(mesh->n_vertices());
  ct::Rng rng(5);
  for (double& v : x) v = rng.uniform(-1.0, 1.0);
  std::vector<double> y1, y2;
  ct::spmv(sys.stiffness, x, y1);
  ct::spmv_serial(sys.stiffness, x, y2);
  CHECK(y1 == y2);
}

TEST_CASE("distribution function: OpenMP and serial paths agree bitwise") {
  const ct::PolarGraph g = ct::random_profile(ct::ConeSpec::planar(2.0), 96, 31);
  const auto mesh = oracle::make_mesh(g, 0.04);
  const ct::FemField u = ct::solve_torsion(mesh);
  double umax = 0.0;
  for (double v : u.values) umax = std::max(umax, v);
  std::vector<double> levels(777);
  for (std::size_t j = 0; j < levels.size(); ++j)
    levels[j] = umax * static_cast<double>(j) / static_cast<double>(levels.size());
  const std::vector<double> a = ct::distribution_function(u, levels);
  const std::vector<double> b = ct::distribution_function_serial(u, levels);
  CHECK(a == b);
}

TEST_CASE("full solve is bitwise reproducible across thread counts") {
  const ct::PolarGraph g = ct::random_profile(ct::ConeSpec::planar(1.3), 96, 77);
  const auto mesh = oracle::make_mesh(g, 0.04);
  const int original = ct::max_threads();
  ct::set_threads(1);
  const ct::FemField u1 = ct::solve_torsion(mesh);
  ct::set_threads(4);
  const ct::FemField u4 = ct::solve_torsion(mesh);
  ct::set_threads(original);
  CHECK(u1.values == u4.values);
}
