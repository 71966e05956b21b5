#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>

#include "conetorsion/geometry.hpp"
#include "conetorsion/rng.hpp"
#include "oracle_helpers.hpp"

namespace ct = conetorsion;
using std::numbers::pi;

namespace {

ct::PolarGraph perturbed_quarter(int n = 256) {
  ct::PolarGraph g;
  g.cone = ct::ConeSpec::planar(pi / 2.0);
  g.rho.resize(n + 1);
  for (int i = 0; i <= n; ++i) g.rho[i] = 1.0 + 0.1 * std::cos(4.0 * g.cone.aperture * i / n);
  return g;
}

}  // namespace

TEST_CASE("volume: sectors and the perturbed quarter disk") {
  CHECK(ct::volume(ct::sector_graph(ct::ConeSpec::planar(pi / 2.0), 1.0, 64)) ==
        doctest::Approx(pi / 4.0).epsilon(1e-14));
  // closed form 1/2 int (1 + 0.1 cos 4t)^2 dt = pi/4 + pi/800
  CHECK(ct::volume(perturbed_quarter()) == doctest::Approx(pi / 4.0 + pi / 800.0).epsilon(1e-10));
  CHECK(ct::volume(ct::sector_graph(ct::ConeSpec::axisym(pi / 4.0), 1.0, 64)) ==
        doctest::Approx(2.0 * pi / 3.0 * (1.0 - std::sqrt(2.0) / 2.0)).epsilon(1e-14));
}

TEST_CASE("volume agrees with the adaptive-quadrature oracle") {
  const ct::PolarGraph g = perturbed_quarter();
  const double ref = 0.5 * oracle::integrate(
                               [](double t) {
                                 const double r = 1.0 + 0.1 * std::cos(4.0 * t);
                                 return r * r;
                               },
                               0.0, pi / 2.0);
  CHECK(ct::volume(g) == doctest::Approx(ref).epsilon(1e-10));

  const ct::PolarGraph ga = ct::random_profile(ct::ConeSpec::axisym(0.6), 192, 7);
  const double refa = oracle::integrate(
      [&ga](double t) {
        // sample the same grid profile by linear interpolation
        const double x = t / ga.dtheta();
        const int k = std::min(ga.n_theta() - 1, static_cast<int>(x));
        const double s = x - k;
        const double r = (1.0 - s) * ga.rho[k] + s * ga.rho[k + 1];
        return 2.0 * pi / 3.0 * r * r * r * std::sin(t);
      },
      0.0, 0.6);
  CHECK(ct::volume(ga) == doctest::Approx(refa).epsilon(2e-4));
}

TEST_CASE("relative perimeter: sectors, caps, perturbed profile") {
  CHECK(ct::relative_perimeter(ct::sector_graph(ct::ConeSpec::planar(pi / 2.0), 1.0, 64)) ==
        doctest::Approx(pi / 2.0).epsilon(1e-14));
  CHECK(ct::relative_perimeter(ct::sector_graph(ct::ConeSpec::axisym(pi / 4.0), 1.0, 64)) ==
        doctest::Approx(2.0 * pi * (1.0 - std::sqrt(2.0) / 2.0)).epsilon(1e-14));
  // adaptive-quadrature oracle on sqrt(rho^2 + rho'^2); the grid derivative
  // is second order, so the error falls as n^-2 toward the frozen value
  const double e256 = std::abs(ct::relative_perimeter(perturbed_quarter(256)) - 1.63199984680818);
  const double e1024 = std::abs(ct::relative_perimeter(perturbed_quarter(1024)) - 1.63199984680818);
  CHECK(e256 < 2e-5);
  CHECK(e1024 < e256 / 12.0);
}

TEST_CASE("isoperimetric gap: zero on sectors, frozen positive value") {
  for (double alpha : {pi / 4.0, pi / 2.0, 3.0 * pi / 4.0, pi})
    for (double radius : {0.5, 1.0, 2.0})
      CHECK(std::abs(ct::isoperimetric_gap(ct::sector_graph(ct::ConeSpec::planar(alpha), radius,
                                                            64))) <= 1e-12);
  CHECK(std::abs(ct::isoperimetric_gap(
            ct::sector_graph(ct::ConeSpec::axisym(pi / 4.0), 1.5, 64))) <= 1e-12);
  CHECK(ct::isoperimetric_gap(perturbed_quarter(1024)) ==
        doctest::Approx(0.0572814257011874).epsilon(2e-5));
}

TEST_CASE("isoperimetric gap positive for random smooth profiles in a convex cone") {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const ct::PolarGraph g = ct::random_profile(ct::ConeSpec::planar(pi / 4.0), 128, seed);
    if (g.constant_profile()) continue;
    CHECK(ct::isoperimetric_gap(g) > 0.0);
  }
}

TEST_CASE("scaling laws hold exactly on the discrete representation") {
  const ct::PolarGraph g = perturbed_quarter(128);
  const double t = 2.0;
  CHECK(ct::volume(g.scaled(t)) == doctest::Approx(t * t * ct::volume(g)).epsilon(1e-14));
  CHECK(ct::relative_perimeter(g.scaled(t)) ==
        doctest::Approx(t * ct::relative_perimeter(g)).epsilon(1e-14));
  CHECK(ct::isoperimetric_gap(g.scaled(t)) ==
        doctest::Approx(t * ct::isoperimetric_gap(g)).epsilon(1e-12));

  const ct::PolarGraph ga = ct::random_profile(ct::ConeSpec::axisym(0.5), 128, 3);
  CHECK(ct::volume(ga.scaled(t)) == doctest::Approx(t * t * t * ct::volume(ga)).epsilon(1e-14));
  CHECK(ct::isoperimetric_gap(ga.scaled(t)) ==
        doctest::Approx(t * t * ct::isoperimetric_gap(ga)).epsilon(1e-12));
}

TEST_CASE("sector_of_same_volume") {
  const ct::PolarGraph g = perturbed_quarter();
  const ct::PolarGraph s = ct::sector_of_same_volume(g);
  CHECK(s.constant_profile());
  CHECK(s.rho.front() == doctest::Approx(std::sqrt((pi / 4.0 + pi / 800.0) / (pi / 4.0)))
                             .epsilon(1e-10));
  CHECK(ct::volume(s) == doctest::Approx(ct::volume(g)).epsilon(1e-12));

  // constant profiles are fixed points, bit for bit
  const ct::PolarGraph c = ct::sector_graph(ct::ConeSpec::axisym(pi / 4.0), 2.0, 32);
  const ct::PolarGraph cc = ct::sector_of_same_volume(c);
  CHECK(cc.rho == c.rho);
}

TEST_CASE("input validation") {
  ct::PolarGraph bad;
  bad.cone = ct::ConeSpec::planar(pi / 2.0);
  bad.rho.assign(33, 1.0);
  bad.rho[7] = -0.1;
  CHECK_THROWS_AS(ct::volume(bad), std::invalid_argument);
  bad.rho[7] = 0.0;
  CHECK_THROWS_AS(ct::relative_perimeter(bad), std::invalid_argument);
  ct::PolarGraph small;
  small.cone = ct::ConeSpec::planar(pi / 2.0);
  small.rho.assign(5, 1.0);
  CHECK_THROWS_AS(ct::volume(small), std::invalid_argument);
  CHECK_THROWS_AS(ct::ConeSpec::planar(0.0).validate(), std::invalid_argument);
  CHECK_THROWS_AS(ct::ConeSpec::axisym(2.0).validate(), std::invalid_argument);
}
