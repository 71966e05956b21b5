#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <memory>
#include <vector>

#include "conetorsion/cone.hpp"

namespace conetorsion {

enum class BoundaryTag : std::uint8_t { Gamma, Gamma1 };

struct BoundaryFacet {
  int a = 0, b = 0;  // vertex indices, ordered along the boundary
  BoundaryTag tag = BoundaryTag::Gamma;
};

struct MeshParams {
  double target_h = 0.02;
  double grading_exponent = 2.0;  // >= 1; refinement toward the vertex, Gamma and the corner rays
  std::int64_t max_elements = 8'000'000;
};

// Conforming triangulation of a polar-graph domain, built from a structured
// radial x angular template mapped by rho and split into triangles. Planar
// meshes live in (x, y); axisymmetric meshes are meridian-plane (r, z)
// triangulations and every integral below carries the 2*pi*r weight.
struct SectorMesh {
  ConeSpec cone;
  std::vector<std::array<double, 2>> vertices;
  std::vector<std::array<int, 3>> triangles;  // positively oriented
  std::vector<BoundaryFacet> boundary_facets;
  double grading_exponent = 2.0;
  double graph_volume = 0.0;  // Simpson volume of the source graph

  int n_vertices() const { return static_cast<int>(vertices.size()); }
  int n_elements() const { return static_cast<int>(triangles.size()); }

  double element_area(int e) const;
  // 1 for planar meshes, 2*pi*centroid_r for axisymmetric ones; the weighted
  // element measure is weight(e) * element_area(e).
  double element_weight(int e) const;
  double facet_length(int f) const;
  double facet_measure(int f) const;  // weighted for axisymmetric meshes
  // polar angle of the facet midpoint: atan2(y, x) planar, atan2(r, z) axisym
  double facet_theta(int f) const;

  double mesh_measure() const;  // sum of weighted element areas
  std::vector<char> gamma_vertex_mask() const;
  std::vector<int> gamma_facet_indices() const;
  // adjacent element per GAMMA facet, in gamma_facet_indices() order
  std::vector<int> gamma_facet_elements() const;

  // throws MeshFailure on violated invariants (orientation, tags, measures)
  void validate() const;
};

SectorMesh generate_mesh(const PolarGraph& g, const MeshParams& params);

// plain-text triangle mesh: "v x y" / "t i j k" / "b i j TAG"
void write_mesh_text(const SectorMesh& m, std::ostream& os);

}  // namespace conetorsion
