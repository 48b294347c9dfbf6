#pragma once

// Spherical meshes (computational and adapted) and their generators.

#include <array>
#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "otsphere/geometry.hpp"

namespace otsphere {

enum class MeshFamily { Icosahedral, CubedSphere, LatLon, Custom };

const char* to_string(MeshFamily f);

/// A triangle or quadrilateral, vertices counterclockwise seen from outside.
struct Cell {
  std::array<std::int32_t, 4> v{};
  std::uint8_t size = 0;

  std::span<const std::int32_t> indices() const { return {v.data(), size}; }
};

struct Edge {
  std::int32_t a;
  std::int32_t b;
};

/// Vertices on S^2 plus fixed connectivity. Immutable once built; adapted
/// meshes share the connectivity of their computational mesh.
class SphereMesh {
 public:
  /// Validates indices (in range, distinct per cell) and edge manifoldness.
  SphereMesh(std::vector<UnitVector> vertices, std::vector<Cell> cells, MeshFamily family);

  const std::vector<UnitVector>& vertices() const noexcept { return vertices_; }
  const std::vector<Cell>& cells() const noexcept { return cells_; }
  const std::vector<Edge>& edges() const noexcept { return edges_; }
  MeshFamily family() const noexcept { return family_; }

  std::size_t vertex_count() const noexcept { return vertices_.size(); }
  std::size_t cell_count() const noexcept { return cells_.size(); }

  /// True when every edge is shared by exactly two cells.
  bool is_closed() const noexcept { return closed_; }

  /// Same connectivity, new vertex positions.
  SphereMesh with_vertices(std::vector<UnitVector> moved) const;

 private:
  SphereMesh() = default;

  std::vector<UnitVector> vertices_;
  std::vector<Cell> cells_;
  std::vector<Edge> edges_;
  MeshFamily family_ = MeshFamily::Custom;
  bool closed_ = false;
};

inline constexpr int kMaxIcosahedralRefinement = 8;

/// 20 * 4^r triangles; two vertices on +-z. Faces of the icosahedron are
/// bisected in 3-space and the vertices projected radially once at the end.
SphereMesh icosahedral_mesh(int refinement);

/// 6 n^2 gnomonic quadrilaterals.
SphereMesh cubed_sphere_mesh(int n);

/// Latitude-longitude quads with triangle fans closing both polar caps.
SphereMesh latlon_mesh(int n_lat, int n_lon);

/// Area of the geodesic triangle (a, b, c); negative when clockwise.
double signed_triangle_area(const Vec3& a, const Vec3& b, const Vec3& c);

/// Area of the geodesic polygon through `corners` (fan triangulation).
double spherical_polygon_area(std::span<const Vec3> corners);

/// Per-cell spherical areas; throws DegenerateCell if any is not positive.
std::vector<double> cell_areas(const SphereMesh& mesh);

/// Per-edge great-circle lengths, in the order of SphereMesh::edges().
std::vector<double> edge_lengths(const SphereMesh& mesh);

}  // namespace otsphere
