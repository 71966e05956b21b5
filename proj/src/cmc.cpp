#include "conetorsion/cmc.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "conetorsion/errors.hpp"
#include "conetorsion/geometry.hpp"
#include "conetorsion/shapeflow.hpp"

namespace conetorsion {

namespace {

constexpr double kPi = std::numbers::pi;

double dot(const std::array<double, 2>& a, const std::array<double, 2>& b) {
  return a[0] * b[0] + a[1] * b[1];
}

double norm(const std::array<double, 2>& a) { return std::sqrt(dot(a, a)); }

double segment_length(const CurveGamma& c, int k) {
  const double dx = c.points[k + 1][0] - c.points[k][0];
  const double dy = c.points[k + 1][1] - c.points[k][1];
  return std::sqrt(dx * dx + dy * dy);
}

// trapezoid quadrature of f over Gamma; axisymmetric measure carries 2*pi*r
double curve_integral(const CurveGamma& c, const std::vector<double>& f) {
  const bool planar = c.cone.planar2d();
  double s = 0.0;
  for (int k = 0; k + 1 < c.n_samples(); ++k) {
    const double wa = planar ? 1.0 : 2.0 * kPi * c.points[k][0];
    const double wb = planar ? 1.0 : 2.0 * kPi * c.points[k + 1][0];
    s += 0.5 * (f[k] * wa + f[k + 1] * wb) * segment_length(c, k);
  }
  return s;
}

// outward wall normals of the two rays (planar) or the wall ray (axisym)
std::array<double, 2> wall_normal_low(const ConeSpec&) { return {0.0, -1.0}; }

std::array<double, 2> wall_normal_high(const ConeSpec& cone) {
  if (cone.planar2d()) return {-std::sin(cone.aperture), std::cos(cone.aperture)};
  return {std::cos(cone.aperture), -std::sin(cone.aperture)};
}

double dist_to_ray(const std::array<double, 2>& p, const std::array<double, 2>& dir) {
  const double t = dot(p, dir);
  if (t <= 0.0) return norm(p);
  return std::sqrt(std::max(0.0, dot(p, p) - t * t));
}

struct LinearSolve3 {
  // solves the symmetric 3x3 system by Gaussian elimination with pivoting
  static bool run(double a[3][3], double b[3], double x[3]) {
    int idx[3] = {0, 1, 2};
    for (int col = 0; col < 3; ++col) {
      int piv = col;
      for (int r = col + 1; r < 3; ++r)
        if (std::abs(a[idx[r]][col]) > std::abs(a[idx[piv]][col])) piv = r;
      std::swap(idx[col], idx[piv]);
      const double d = a[idx[col]][col];
      if (d == 0.0) return false;
      for (int r = col + 1; r < 3; ++r) {
        const double f = a[idx[r]][col] / d;
        for (int cc = col; cc < 3; ++cc) a[idx[r]][cc] -= f * a[idx[col]][cc];
        b[idx[r]] -= f * b[idx[col]];
      }
    }
    for (int col = 2; col >= 0; --col) {
      double s = b[idx[col]];
      for (int cc = col + 1; cc < 3; ++cc) s -= a[idx[col]][cc] * x[cc];
      x[col] = s / a[idx[col]][col];
    }
    return true;
  }
};

}  // namespace

double CurveGamma::mean_curvature(int i) const {
  if (cone.planar2d()) return k1[i];
  return 0.5 * (k1[i] + k2[i]);
}

void CurveGamma::validate() const {
  cone.validate();
  if (points.size() < 3) throw std::invalid_argument("curve needs at least 3 samples");
  if (normals.size() != points.size() || k1.size() != points.size())
    throw std::invalid_argument("curve arrays must have matching lengths");
  if (!cone.planar2d() && k2.size() != points.size())
    throw std::invalid_argument("axisymmetric curve needs both principal curvatures");
  double scale = 0.0;
  for (const auto& p : points) scale = std::max(scale, norm(p));
  const double tol = 1e-10 * scale;
  if (cone.planar2d()) {
    // endpoints on the rays theta = 0 and theta = aperture
    const auto& p0 = points.front();
    const auto& pn = points.back();
    if (std::abs(p0[1]) > tol || p0[0] < -tol)
      throw std::invalid_argument("first endpoint must lie on the ray theta = 0");
    const std::array<double, 2> nh = wall_normal_high(cone);
    if (std::abs(dot(pn, nh)) > tol)
      throw std::invalid_argument("last endpoint must lie on the ray theta = aperture");
  } else {
    if (std::abs(points.front()[0]) > tol)
      throw std::invalid_argument("meridian must start on the axis");
    const std::array<double, 2> nh = wall_normal_high(cone);
    if (std::abs(dot(points.back(), nh)) > tol)
      throw std::invalid_argument("meridian must end on the cone wall");
  }
  for (const auto& nu : normals)
    if (std::abs(norm(nu) - 1.0) > 1e-9)
      throw std::invalid_argument("normals must be unit length");
}

double orthogonality_defect(const CurveGamma& c) {
  c.validate();
  if (c.cone.planar2d()) {
    const double d0 = std::abs(dot(c.normals.front(), wall_normal_low(c.cone)));
    const double d1 = std::abs(dot(c.normals.back(), wall_normal_high(c.cone)));
    return std::max(d0, d1);
  }
  // axis endpoint: meridian regularity means the normal is parallel to the
  // axis there, so any r-component is a defect
  const double axis_defect = std::abs(c.normals.front()[0]);
  const double wall_defect = std::abs(dot(c.normals.back(), wall_normal_high(c.cone)));
  return std::max(axis_defect, wall_defect);
}

double minkowski1_residual(const CurveGamma& c) {
  c.validate();
  std::vector<double> f(c.n_samples());
  for (int k = 0; k < c.n_samples(); ++k)
    f[k] = 1.0 - c.mean_curvature(k) * dot(c.points[k], c.normals[k]);
  return curve_integral(c, f);
}

double mean_curvature_identity_gap(const CurveGamma& c, const PolarGraph& g,
                                   double max_relative_spread) {
  c.validate();
  g.validate();
  std::vector<double> h(c.n_samples()), one(c.n_samples(), 1.0);
  for (int k = 0; k < c.n_samples(); ++k) h[k] = c.mean_curvature(k);
  const double measure = curve_integral(c, one);
  const double hbar = curve_integral(c, h) / measure;
  double spread = 0.0;
  for (double v : h) spread = std::max(spread, std::abs(v - hbar));
  if (spread > max_relative_spread * std::abs(hbar))
    throw NonConstantCurvature("sampled mean curvature is not constant within tolerance");
  const double target = relative_perimeter(g) / (g.cone.dimension() * volume(g));
  return std::abs(hbar - target);
}

UmbilicityReport umbilicity_gap(const CurveGamma& c) {
  c.validate();
  if (c.cone.planar2d())
    throw std::invalid_argument("umbilicity_gap needs an axisymmetric curve");
  UmbilicityReport rep;
  std::vector<double> f(c.n_samples());
  for (int k = 0; k < c.n_samples(); ++k) {
    const double h = 0.5 * (c.k1[k] + c.k2[k]);
    const double sigma2 = c.k1[k] * c.k2[k];
    const double d = 0.5 * (c.k1[k] - c.k2[k]);
    rep.gap = std::max(rep.gap, d * d);  // H^2 - sigma2 = ((k1-k2)/2)^2
    f[k] = h - sigma2 * dot(c.points[k], c.normals[k]);
  }
  rep.minkowski2_residual = curve_integral(c, f);
  return rep;
}

CenterReport locate_center(const CurveGamma& c, const CenterFitParams& params) {
  c.validate();
  const int n = c.n_samples();
  // algebraic fit: minimize sum (|x|^2 - 2<p,x> - q)^2 via normal equations
  double a[3][3] = {{0, 0, 0}, {0, 0, 0}, {0, 0, 0}};
  double b[3] = {0, 0, 0};
  for (const auto& pt : c.points) {
    const double row[3] = {2.0 * pt[0], 2.0 * pt[1], 1.0};
    const double z = dot(pt, pt);
    for (int i = 0; i < 3; ++i) {
      for (int j = 0; j < 3; ++j) a[i][j] += row[i] * row[j];
      b[i] += row[i] * z;
    }
  }
  double beta[3];
  if (!LinearSolve3::run(a, b, beta)) throw NotSpherical("degenerate circle fit");
  std::array<double, 2> center{beta[0], beta[1]};
  double radius = std::sqrt(std::max(0.0, beta[2] + dot(center, center)));

  // one geometric Gauss-Newton step on r_i = |x_i - p| - R
  double jj[3][3] = {{0, 0, 0}, {0, 0, 0}, {0, 0, 0}};
  double jr[3] = {0, 0, 0};
  for (const auto& pt : c.points) {
    const std::array<double, 2> d{pt[0] - center[0], pt[1] - center[1]};
    const double dist = norm(d);
    if (dist == 0.0) continue;
    const double row[3] = {-d[0] / dist, -d[1] / dist, -1.0};
    const double res = dist - radius;
    for (int i = 0; i < 3; ++i) {
      for (int j = 0; j < 3; ++j) jj[i][j] += row[i] * row[j];
      jr[i] += row[i] * res;
    }
  }
  double delta[3] = {0, 0, 0};
  for (int i = 0; i < 3; ++i) jr[i] = -jr[i];
  if (LinearSolve3::run(jj, jr, delta)) {
    center[0] += delta[0];
    center[1] += delta[1];
    radius += delta[2];
  }

  CenterReport rep;
  rep.fit.center = center;
  rep.fit.radius = radius;
  for (const auto& pt : c.points) {
    const std::array<double, 2> d{pt[0] - center[0], pt[1] - center[1]};
    rep.fit.max_fit_residual = std::max(rep.fit.max_fit_residual, std::abs(norm(d) - radius));
  }
  if (!(radius > 0.0) || rep.fit.max_fit_residual > params.fit_residual_tol * radius)
    throw NotSpherical("samples do not lie on a circle within tolerance");

  const double tol = params.classification_tol * radius;
  double wall_dist;
  if (c.cone.planar2d()) {
    const std::array<double, 2> d0{1.0, 0.0};
    const std::array<double, 2> d1{std::cos(c.cone.aperture), std::sin(c.cone.aperture)};
    wall_dist = std::min(dist_to_ray(center, d0), dist_to_ray(center, d1));
  } else {
    const std::array<double, 2> dw{std::sin(c.cone.aperture), std::cos(c.cone.aperture)};
    wall_dist = dist_to_ray(center, dw);
  }
  if (norm(center) <= tol)
    rep.classification = CenterClass::Vertex;
  else if (wall_dist <= tol)
    rep.classification = CenterClass::Wall;
  else
    rep.classification = CenterClass::Neither;
  // the Wall alternative needs a flat wall portion, which among these cones
  // only the half-plane alpha = pi has
  rep.admissible = rep.classification == CenterClass::Vertex ||
                   (rep.classification == CenterClass::Wall && c.cone.planar2d() &&
                    std::abs(c.cone.aperture - kPi) <= 1e-9);
  return rep;
}

CurveGamma arc_about_vertex(const ConeSpec& cone, double radius, int n) {
  if (!cone.planar2d()) return spherical_cap(cone, radius, n);
  CurveGamma c;
  c.cone = cone;
  c.curvature_source = CurvatureSource::Analytic;
  for (int k = 0; k <= n; ++k) {
    const double th = cone.aperture * k / n;
    c.points.push_back({radius * std::cos(th), radius * std::sin(th)});
    c.normals.push_back({std::cos(th), std::sin(th)});
    c.k1.push_back(1.0 / radius);
  }
  return c;
}

CurveGamma arc_about(const ConeSpec& cone, std::array<double, 2> center, double radius, int n) {
  if (!cone.planar2d()) throw std::invalid_argument("arc_about is planar only");
  // endpoint on the ray theta = 0 (far intersection)
  if (std::abs(center[1]) >= radius)
    throw std::invalid_argument("circle does not reach the ray theta = 0");
  const double x0 = center[0] + std::sqrt(radius * radius - center[1] * center[1]);
  const std::array<double, 2> e0{x0, 0.0};
  // endpoint on the ray theta = aperture
  const std::array<double, 2> dir{std::cos(cone.aperture), std::sin(cone.aperture)};
  const double pd = dot(center, dir);
  const double disc = pd * pd - dot(center, center) + radius * radius;
  if (disc <= 0.0) throw std::invalid_argument("circle does not reach the ray theta = aperture");
  const double s = pd + std::sqrt(disc);
  const std::array<double, 2> e1{s * dir[0], s * dir[1]};

  double phi0 = std::atan2(e0[1] - center[1], e0[0] - center[0]);
  double phi1 = std::atan2(e1[1] - center[1], e1[0] - center[0]);
  if (phi1 <= phi0) phi1 += 2.0 * kPi;
  CurveGamma c;
  c.cone = cone;
  c.curvature_source = CurvatureSource::Analytic;
  for (int k = 0; k <= n; ++k) {
    const double phi = phi0 + (phi1 - phi0) * k / n;
    c.points.push_back({center[0] + radius * std::cos(phi), center[1] + radius * std::sin(phi)});
    c.normals.push_back({std::cos(phi), std::sin(phi)});
    c.k1.push_back(1.0 / radius);
  }
  // snap the endpoints to the exact ray intersections
  c.points.front() = e0;
  c.points.back() = e1;
  return c;
}

CurveGamma half_circle_on_wall(double cx, double radius, int n) {
  CurveGamma c;
  c.cone = ConeSpec::planar(kPi);
  c.curvature_source = CurvatureSource::Analytic;
  for (int k = 0; k <= n; ++k) {
    const double phi = kPi * k / n;
    c.points.push_back({cx + radius * std::cos(phi), radius * std::sin(phi)});
    c.normals.push_back({std::cos(phi), std::sin(phi)});
    c.k1.push_back(1.0 / radius);
  }
  c.points.front() = {cx + radius, 0.0};
  c.points.back() = {cx - radius, 0.0};
  return c;
}

CurveGamma spherical_cap(const ConeSpec& cone, double radius, int n) {
  if (cone.planar2d()) throw std::invalid_argument("spherical_cap is axisymmetric only");
  CurveGamma c;
  c.cone = cone;
  c.curvature_source = CurvatureSource::Analytic;
  for (int k = 0; k <= n; ++k) {
    const double t = cone.aperture * k / n;
    c.points.push_back({radius * std::sin(t), radius * std::cos(t)});
    c.normals.push_back({std::sin(t), std::cos(t)});
    c.k1.push_back(1.0 / radius);
    c.k2.push_back(1.0 / radius);
  }
  return c;
}

CurveGamma spheroid_cap(const ConeSpec& cone, double a, double cc, int n) {
  if (cone.planar2d()) throw std::invalid_argument("spheroid_cap is axisymmetric only");
  // meridian (a sin t, c cos t); the wall angle beta corresponds to
  // tan(t) = (c/a) tan(beta)
  const double tmax = std::atan((cc / a) * std::tan(cone.aperture));
  CurveGamma c;
  c.cone = cone;
  c.curvature_source = CurvatureSource::Analytic;
  for (int k = 0; k <= n; ++k) {
    const double t = tmax * k / n;
    const double st = std::sin(t), ct = std::cos(t);
    const double w = std::sqrt(a * a * ct * ct + cc * cc * st * st);
    c.points.push_back({a * st, cc * ct});
    c.normals.push_back({cc * st / w, a * ct / w});
    c.k1.push_back(a * cc / (w * w * w));      // meridian curvature
    c.k2.push_back(cc / (a * w));              // parallel curvature
  }
  return c;
}

CurveGamma curve_from_graph(const PolarGraph& g) {
  g.validate();
  const int n = g.n_theta();
  const std::vector<double> dr = profile_derivative(g);
  CurveGamma c;
  c.cone = g.cone;
  c.curvature_source = CurvatureSource::Estimated;
  const bool planar = g.cone.planar2d();
  std::vector<double> km, kp;
  if (planar) {
    km = graph_curvature_planar(g);
  } else {
    graph_curvature_axisym(g, km, kp);
  }
  for (int i = 0; i <= n; ++i) {
    const double th = g.theta(i);
    const double r = g.rho[i];
    const double mag = std::sqrt(r * r + dr[i] * dr[i]);
    if (planar) {
      c.points.push_back({r * std::cos(th), r * std::sin(th)});
      c.normals.push_back(
          {(r * std::cos(th) + dr[i] * std::sin(th)) / mag,
           (r * std::sin(th) - dr[i] * std::cos(th)) / mag});
      c.k1.push_back(km[i]);
    } else {
      c.points.push_back({r * std::sin(th), r * std::cos(th)});
      c.normals.push_back(
          {(r * std::sin(th) - dr[i] * std::cos(th)) / mag,
           (r * std::cos(th) + dr[i] * std::sin(th)) / mag});
      c.k1.push_back(km[i]);
      c.k2.push_back(kp[i]);
    }
  }
  return c;
}

}  // namespace conetorsion
