#include "conetorsion/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <ostream>
#include <stdexcept>
#include <utility>

#include "conetorsion/errors.hpp"
#include "conetorsion/format.hpp"
#include "conetorsion/geometry.hpp"

namespace conetorsion {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kWallBand = 1e-6;  // vertex tolerance band, relative to max rho

// Two-sided grading on [0,1]: clusters points toward both ends with the given
// exponent; identity at p = 1. B'(1/2) = p bounds the interior stretch.
double grade(double xi, double p) {
  if (xi <= 0.0) return 0.0;
  if (xi >= 1.0) return 1.0;
  const double a = std::pow(xi, p);
  const double b = std::pow(1.0 - xi, p);
  return a / (a + b);
}

double signed_area(const std::array<double, 2>& a, const std::array<double, 2>& b,
                   const std::array<double, 2>& c) {
  return 0.5 * ((b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0]));
}

}  // namespace

double SectorMesh::element_area(int e) const {
  const auto& t = triangles[e];
  return signed_area(vertices[t[0]], vertices[t[1]], vertices[t[2]]);
}

double SectorMesh::element_weight(int e) const {
  if (cone.planar2d()) return 1.0;
  const auto& t = triangles[e];
  const double rbar = (vertices[t[0]][0] + vertices[t[1]][0] + vertices[t[2]][0]) / 3.0;
  return 2.0 * kPi * rbar;
}

double SectorMesh::facet_length(int f) const {
  const auto& bf = boundary_facets[f];
  const double dx = vertices[bf.b][0] - vertices[bf.a][0];
  const double dy = vertices[bf.b][1] - vertices[bf.a][1];
  return std::sqrt(dx * dx + dy * dy);
}

double SectorMesh::facet_measure(int f) const {
  const double len = facet_length(f);
  if (cone.planar2d()) return len;
  const auto& bf = boundary_facets[f];
  const double rbar = 0.5 * (vertices[bf.a][0] + vertices[bf.b][0]);
  return 2.0 * kPi * rbar * len;
}

double SectorMesh::facet_theta(int f) const {
  const auto& bf = boundary_facets[f];
  const double mx = 0.5 * (vertices[bf.a][0] + vertices[bf.b][0]);
  const double my = 0.5 * (vertices[bf.a][1] + vertices[bf.b][1]);
  // meridian coordinates are (r, z); the angle is measured from the axis
  return cone.planar2d() ? std::atan2(my, mx) : std::atan2(mx, my);
}

double SectorMesh::mesh_measure() const {
  double s = 0.0;
  for (int e = 0; e < n_elements(); ++e) s += element_weight(e) * element_area(e);
  return s;
}

std::vector<char> SectorMesh::gamma_vertex_mask() const {
  std::vector<char> mask(vertices.size(), 0);
  for (const auto& bf : boundary_facets)
    if (bf.tag == BoundaryTag::Gamma) {
      mask[bf.a] = 1;
      mask[bf.b] = 1;
    }
  return mask;
}

std::vector<int> SectorMesh::gamma_facet_indices() const {
  std::vector<int> idx;
  for (int f = 0; f < static_cast<int>(boundary_facets.size()); ++f)
    if (boundary_facets[f].tag == BoundaryTag::Gamma) idx.push_back(f);
  return idx;
}

std::vector<int> SectorMesh::gamma_facet_elements() const {
  std::map<std::pair<int, int>, int> edge_owner;
  for (int e = 0; e < n_elements(); ++e) {
    const auto& t = triangles[e];
    for (int k = 0; k < 3; ++k) {
      int a = t[k], b = t[(k + 1) % 3];
      if (a > b) std::swap(a, b);
      edge_owner[{a, b}] = e;  // boundary edges have a unique owner
    }
  }
  std::vector<int> owners;
  for (int f : gamma_facet_indices()) {
    int a = boundary_facets[f].a, b = boundary_facets[f].b;
    if (a > b) std::swap(a, b);
    auto it = edge_owner.find({a, b});
    if (it == edge_owner.end()) throw MeshFailure("GAMMA facet is not an element edge");
    owners.push_back(it->second);
  }
  return owners;
}

void SectorMesh::validate() const {
  cone.validate();
  for (int e = 0; e < n_elements(); ++e)
    if (!(element_area(e) > 0.0)) throw MeshFailure("degenerate or misoriented element");

  // boundary edges (edges owned by exactly one element) must each carry one tag
  std::map<std::pair<int, int>, int> edge_count;
  for (const auto& t : triangles)
    for (int k = 0; k < 3; ++k) {
      int a = t[k], b = t[(k + 1) % 3];
      if (a > b) std::swap(a, b);
      ++edge_count[{a, b}];
    }
  std::map<std::pair<int, int>, int> tagged;
  for (const auto& bf : boundary_facets) {
    int a = bf.a, b = bf.b;
    if (a > b) std::swap(a, b);
    ++tagged[{a, b}];
  }
  for (const auto& [edge, cnt] : edge_count) {
    if (cnt > 2) throw MeshFailure("non-conforming edge");
    const auto it = tagged.find(edge);
    if (cnt == 1 && (it == tagged.end() || it->second != 1))
      throw MeshFailure("boundary edge without exactly one tag");
    if (cnt == 2 && it != tagged.end()) throw MeshFailure("interior edge carries a boundary tag");
  }

  double gamma_measure = 0.0, gamma1_measure = 0.0;
  for (int f = 0; f < static_cast<int>(boundary_facets.size()); ++f) {
    if (boundary_facets[f].tag == BoundaryTag::Gamma)
      gamma_measure += facet_measure(f);
    else
      gamma1_measure += facet_measure(f);
  }
  if (!(gamma_measure > 0.0)) throw MeshFailure("GAMMA has zero measure");
  if (!(gamma1_measure > 0.0)) throw MeshFailure("GAMMA1 has zero measure");
}

SectorMesh generate_mesh(const PolarGraph& g, const MeshParams& params) {
  g.validate();
  const double rho_max = g.max_rho();
  const double rho_min = g.min_rho();
  if (!(params.target_h > 0.0) || !(params.target_h < rho_min))
    throw std::invalid_argument("target_h must be positive and below min rho");
  if (!(params.grading_exponent >= 1.0))
    throw std::invalid_argument("grading_exponent must be >= 1");
  if (rho_min <= kWallBand * rho_max)
    throw MeshFailure("profile enters the vertex tolerance band");

  const double p = params.grading_exponent;
  const double span = g.cone.aperture;
  const int n_r = std::max<int>(2, static_cast<int>(std::ceil(p * rho_max / params.target_h)));
  const int n_a = std::max<int>(4, static_cast<int>(std::ceil(p * rho_max * span / params.target_h)));
  const std::int64_t n_el = static_cast<std::int64_t>(n_a) * (2 * n_r - 1);
  if (n_el > params.max_elements) throw MeshFailure("target_h exceeds the element budget");

  // graded radial fractions and angles; profile values at the mesh angles by
  // linear interpolation of the rho grid
  std::vector<double> frac(n_r + 1), theta(n_a + 1), rho_at(n_a + 1);
  for (int i = 0; i <= n_r; ++i) frac[i] = grade(double(i) / n_r, p);
  for (int j = 0; j <= n_a; ++j) theta[j] = span * grade(double(j) / n_a, p);
  const int n_g = g.n_theta();
  for (int j = 0; j <= n_a; ++j) {
    const double x = theta[j] / g.dtheta();
    const int k = std::min(n_g - 1, std::max(0, static_cast<int>(std::floor(x))));
    const double s = x - k;
    rho_at[j] = (1.0 - s) * g.rho[k] + s * g.rho[k + 1];
  }

  SectorMesh m;
  m.cone = g.cone;
  m.grading_exponent = p;
  m.graph_volume = volume(g);
  m.vertices.reserve(1 + static_cast<std::size_t>(n_r) * (n_a + 1));
  m.vertices.push_back({0.0, 0.0});  // the vertex O
  const bool planar = g.cone.planar2d();
  for (int i = 1; i <= n_r; ++i)
    for (int j = 0; j <= n_a; ++j) {
      const double r = frac[i] * rho_at[j];
      if (planar)
        m.vertices.push_back({r * std::cos(theta[j]), r * std::sin(theta[j])});
      else
        m.vertices.push_back({r * std::sin(theta[j]), r * std::cos(theta[j])});
    }
  auto vid = [n_a](int i, int j) { return 1 + (i - 1) * (n_a + 1) + j; };

  auto push_tri = [&m](int a, int b, int c) {
    if (signed_area(m.vertices[a], m.vertices[b], m.vertices[c]) < 0.0) std::swap(b, c);
    m.triangles.push_back({a, b, c});
  };

  m.triangles.reserve(static_cast<std::size_t>(n_el));
  for (int j = 0; j < n_a; ++j) push_tri(0, vid(1, j), vid(1, j + 1));
  for (int i = 1; i < n_r; ++i)
    for (int j = 0; j < n_a; ++j) {
      const int v00 = vid(i, j), v10 = vid(i + 1, j);
      const int v11 = vid(i + 1, j + 1), v01 = vid(i, j + 1);
      if ((i + j) % 2 == 0) {
        push_tri(v00, v10, v11);
        push_tri(v00, v11, v01);
      } else {
        push_tri(v00, v10, v01);
        push_tri(v10, v11, v01);
      }
    }

  // GAMMA facets first, ordered by angle; then the two GAMMA1 columns
  for (int j = 0; j < n_a; ++j)
    m.boundary_facets.push_back({vid(n_r, j), vid(n_r, j + 1), BoundaryTag::Gamma});
  m.boundary_facets.push_back({0, vid(1, 0), BoundaryTag::Gamma1});
  for (int i = 1; i < n_r; ++i)
    m.boundary_facets.push_back({vid(i, 0), vid(i + 1, 0), BoundaryTag::Gamma1});
  m.boundary_facets.push_back({0, vid(1, n_a), BoundaryTag::Gamma1});
  for (int i = 1; i < n_r; ++i)
    m.boundary_facets.push_back({vid(i, n_a), vid(i + 1, n_a), BoundaryTag::Gamma1});

  m.validate();
  return m;
}

void write_mesh_text(const SectorMesh& m, std::ostream& os) {
  for (const auto& v : m.vertices)
    os << "v " << format_double(v[0]) << ' ' << format_double(v[1]) << '\n';
  for (const auto& t : m.triangles) os << "t " << t[0] << ' ' << t[1] << ' ' << t[2] << '\n';
  for (const auto& bf : m.boundary_facets)
    os << "b " << bf.a << ' ' << bf.b << ' '
       << (bf.tag == BoundaryTag::Gamma ? "GAMMA" : "GAMMA1") << '\n';
}

}  // namespace conetorsion
