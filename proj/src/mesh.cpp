#include "otsphere/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <string>
#include <unordered_map>

namespace otsphere {

const char* to_string(MeshFamily f) {
  switch (f) {
    case MeshFamily::Icosahedral: return "icosahedral";
    case MeshFamily::CubedSphere: return "cubed_sphere";
    case MeshFamily::LatLon: return "latlon";
    case MeshFamily::Custom: return "custom";
  }
  return "custom";
}

namespace {

std::uint64_t edge_key(std::int32_t a, std::int32_t b) {
  if (a > b) std::swap(a, b);
  return (static_cast<std::uint64_t>(a) << 32) | static_cast<std::uint32_t>(b);
}

Cell make_cell(std::initializer_list<std::int32_t> ids) {
  Cell c;
  c.size = static_cast<std::uint8_t>(ids.size());
  std::copy(ids.begin(), ids.end(), c.v.begin());
  return c;
}

// Reverses the cell when it winds clockwise seen from outside.
void orient_outward(Cell& c, const std::vector<UnitVector>& verts) {
  Vec3 n = Vec3::Zero();
  for (std::size_t i = 0; i < c.size; ++i) {
    const Vec3& p = verts[c.v[i]].vec();
    const Vec3& q = verts[c.v[(i + 1) % c.size]].vec();
    n += p.cross(q);
  }
  Vec3 centroid = Vec3::Zero();
  for (std::size_t i = 0; i < c.size; ++i) centroid += verts[c.v[i]].vec();
  if (n.dot(centroid) < 0.0) std::reverse(c.v.begin(), c.v.begin() + c.size);
}

}  // namespace

SphereMesh::SphereMesh(std::vector<UnitVector> vertices, std::vector<Cell> cells,
                       MeshFamily family)
    : vertices_(std::move(vertices)), cells_(std::move(cells)), family_(family) {
  const auto nv = static_cast<std::int32_t>(vertices_.size());
  std::unordered_map<std::uint64_t, int> uses;
  std::unordered_map<std::uint64_t, int> directed;
  uses.reserve(cells_.size() * 4);
  directed.reserve(cells_.size() * 4);
  for (std::size_t ci = 0; ci < cells_.size(); ++ci) {
    const Cell& c = cells_[ci];
    if (c.size < 3 || c.size > 4) {
      fail(ErrorCode::InvalidMesh, "cell " + std::to_string(ci) + " is not a triangle or quad");
    }
    for (std::size_t i = 0; i < c.size; ++i) {
      if (c.v[i] < 0 || c.v[i] >= nv) {
        fail(ErrorCode::InvalidMesh, "cell " + std::to_string(ci) + " has an index out of range");
      }
      for (std::size_t j = 0; j < i; ++j) {
        if (c.v[i] == c.v[j]) {
          fail(ErrorCode::InvalidMesh, "cell " + std::to_string(ci) + " repeats a vertex");
        }
      }
    }
    for (std::size_t i = 0; i < c.size; ++i) {
      const std::int32_t a = c.v[i];
      const std::int32_t b = c.v[(i + 1) % c.size];
      const std::uint64_t k = edge_key(a, b);
      auto [it, inserted] = uses.try_emplace(k, 0);
      if (inserted) edges_.push_back({std::min(a, b), std::max(a, b)});
      if (++it->second > 2) {
        fail(ErrorCode::InvalidMesh, "edge shared by more than two cells");
      }
      const std::uint64_t dk = (static_cast<std::uint64_t>(a) << 32) | static_cast<std::uint32_t>(b);
      if (++directed[dk] > 1) {
        fail(ErrorCode::InvalidMesh, "inconsistent cell orientation");
      }
    }
  }
  closed_ = !cells_.empty() &&
            std::all_of(uses.begin(), uses.end(), [](const auto& kv) { return kv.second == 2; });
}

SphereMesh SphereMesh::with_vertices(std::vector<UnitVector> moved) const {
  if (moved.size() != vertices_.size()) {
    fail(ErrorCode::InvalidMesh, "vertex count does not match the connectivity");
  }
  SphereMesh out;
  out.vertices_ = std::move(moved);
  out.cells_ = cells_;
  out.edges_ = edges_;
  out.family_ = family_;
  out.closed_ = closed_;
  return out;
}

SphereMesh icosahedral_mesh(int refinement) {
  if (refinement < 0 || refinement > kMaxIcosahedralRefinement) {
    fail(ErrorCode::CapExceeded, "icosahedral refinement must be in [0, 8], got " +
                                     std::to_string(refinement));
  }
  constexpr double pi = std::numbers::pi;
  const double z = 1.0 / std::sqrt(5.0);
  const double rho = 2.0 / std::sqrt(5.0);

  std::vector<Vec3> base;
  base.emplace_back(0.0, 0.0, 1.0);
  for (int k = 0; k < 5; ++k) {
    const double a = 2.0 * pi * k / 5.0;
    base.emplace_back(rho * std::cos(a), rho * std::sin(a), z);
  }
  for (int k = 0; k < 5; ++k) {
    const double a = 2.0 * pi * k / 5.0 + pi / 5.0;
    base.emplace_back(rho * std::cos(a), rho * std::sin(a), -z);
  }
  base.emplace_back(0.0, 0.0, -1.0);

  std::vector<std::array<int, 3>> faces;
  for (int k = 0; k < 5; ++k) {
    const int u0 = 1 + k, u1 = 1 + (k + 1) % 5;
    const int l0 = 6 + k, l1 = 6 + (k + 1) % 5;
    faces.push_back({0, u0, u1});
    faces.push_back({u0, l0, u1});
    faces.push_back({u1, l0, l1});
    faces.push_back({11, l1, l0});
  }
  for (auto& f : faces) {
    const Vec3& a = base[f[0]];
    if ((base[f[1]] - a).cross(base[f[2]] - a).dot(a) < 0.0) std::swap(f[1], f[2]);
  }

  // Points are keyed by their integer barycentric weights on the base
  // icosahedron so that shared edges deduplicate exactly.
  const int n = 1 << refinement;
  std::map<std::array<int, 6>, std::int32_t> ids;
  std::vector<UnitVector> verts;
  verts.reserve(10 * n * n + 2);
  auto vertex_id = [&](const std::array<int, 3>& f, int wa, int wb, int wc) {
    std::array<std::pair<int, int>, 3> w{{{f[0], wa}, {f[1], wb}, {f[2], wc}}};
    std::sort(w.begin(), w.end());
    std::array<int, 6> key{};
    int slot = 0;
    for (const auto& [id, weight] : w) {
      if (weight == 0) continue;
      key[slot++] = id;
      key[slot++] = weight;
    }
    for (; slot < 6; slot += 2) key[slot] = -1;
    auto it = ids.find(key);
    if (it != ids.end()) return it->second;
    const Vec3 p = (wa * base[f[0]] + wb * base[f[1]] + wc * base[f[2]]) / n;
    const auto id = static_cast<std::int32_t>(verts.size());
    verts.emplace_back(p);
    ids.emplace(key, id);
    return id;
  };

  std::vector<Cell> cells;
  cells.reserve(20 * n * n);
  std::vector<std::int32_t> grid((n + 1) * (n + 1));
  for (const auto& f : faces) {
    for (int i = 0; i <= n; ++i) {
      for (int j = 0; j <= n - i; ++j) grid[i * (n + 1) + j] = vertex_id(f, n - i - j, i, j);
    }
    auto at = [&](int i, int j) { return grid[i * (n + 1) + j]; };
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n - i; ++j) {
        cells.push_back(make_cell({at(i, j), at(i + 1, j), at(i, j + 1)}));
        if (i + j < n - 1) cells.push_back(make_cell({at(i + 1, j), at(i + 1, j + 1), at(i, j + 1)}));
      }
    }
  }
  return SphereMesh(std::move(verts), std::move(cells), MeshFamily::Icosahedral);
}

SphereMesh cubed_sphere_mesh(int n) {
  if (n < 1) fail(ErrorCode::ValidationError, "cubed-sphere resolution must be >= 1");
  const int m = n + 1;
  std::vector<std::int32_t> lattice(static_cast<std::size_t>(m) * m * m, -1);
  std::vector<UnitVector> verts;
  verts.reserve(6 * n * n + 2);
  auto vertex_id = [&](const std::array<int, 3>& ijk) {
    auto& slot = lattice[(static_cast<std::size_t>(ijk[0]) * m + ijk[1]) * m + ijk[2]];
    if (slot < 0) {
      slot = static_cast<std::int32_t>(verts.size());
      verts.emplace_back(Vec3(2.0 * ijk[0] / n - 1.0, 2.0 * ijk[1] / n - 1.0, 2.0 * ijk[2] / n - 1.0));
    }
    return slot;
  };

  std::vector<Cell> cells;
  cells.reserve(6 * n * n);
  for (int axis = 0; axis < 3; ++axis) {
    const int b = (axis + 1) % 3;
    const int c = (axis + 2) % 3;
    for (int side : {0, n}) {
      for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
          auto corner = [&](int di, int dj) {
            std::array<int, 3> ijk{};
            ijk[axis] = side;
            ijk[b] = i + di;
            ijk[c] = j + dj;
            return vertex_id(ijk);
          };
          Cell cell = make_cell({corner(0, 0), corner(1, 0), corner(1, 1), corner(0, 1)});
          orient_outward(cell, verts);
          cells.push_back(cell);
        }
      }
    }
  }
  return SphereMesh(std::move(verts), std::move(cells), MeshFamily::CubedSphere);
}

SphereMesh latlon_mesh(int n_lat, int n_lon) {
  if (n_lat < 2 || n_lon < 3) {
    fail(ErrorCode::ValidationError, "latlon mesh needs n_lat >= 2 and n_lon >= 3");
  }
  constexpr double pi = std::numbers::pi;
  std::vector<UnitVector> verts;
  verts.emplace_back(0.0, 0.0, 1.0);
  for (int l = 1; l < n_lat; ++l) {
    const double theta = pi * l / n_lat;
    for (int k = 0; k < n_lon; ++k) {
      const double phi = 2.0 * pi * k / n_lon;
      verts.emplace_back(std::sin(theta) * std::cos(phi), std::sin(theta) * std::sin(phi),
                         std::cos(theta));
    }
  }
  verts.emplace_back(0.0, 0.0, -1.0);
  const auto south = static_cast<std::int32_t>(verts.size() - 1);
  auto ring = [&](int l, int k) { return static_cast<std::int32_t>(1 + (l - 1) * n_lon + (k % n_lon)); };

  std::vector<Cell> cells;
  for (int k = 0; k < n_lon; ++k) {
    // Counterclockwise seen from outside: increasing azimuth at the north cap.
    cells.push_back(make_cell({0, ring(1, k), ring(1, k + 1)}));
  }
  for (int l = 1; l < n_lat - 1; ++l) {
    for (int k = 0; k < n_lon; ++k) {
      cells.push_back(make_cell({ring(l, k), ring(l + 1, k), ring(l + 1, k + 1), ring(l, k + 1)}));
    }
  }
  for (int k = 0; k < n_lon; ++k) {
    cells.push_back(make_cell({south, ring(n_lat - 1, k + 1), ring(n_lat - 1, k)}));
  }
  for (auto& c : cells) orient_outward(c, verts);
  return SphereMesh(std::move(verts), std::move(cells), MeshFamily::LatLon);
}

double signed_triangle_area(const Vec3& a, const Vec3& b, const Vec3& c) {
  const double num = a.dot(b.cross(c));
  const double den = 1.0 + a.dot(b) + b.dot(c) + c.dot(a);
  return 2.0 * std::atan2(num, den);
}

double spherical_polygon_area(std::span<const Vec3> corners) {
  double area = 0.0;
  for (std::size_t i = 1; i + 1 < corners.size(); ++i) {
    area += signed_triangle_area(corners[0], corners[i], corners[i + 1]);
  }
  return area;
}

std::vector<double> cell_areas(const SphereMesh& mesh) {
  const auto& verts = mesh.vertices();
  std::vector<double> areas(mesh.cell_count());
  for (std::size_t ci = 0; ci < mesh.cell_count(); ++ci) {
    const Cell& c = mesh.cells()[ci];
    std::array<Vec3, 4> p;
    for (std::size_t i = 0; i < c.size; ++i) p[i] = verts[c.v[i]].vec();
    areas[ci] = spherical_polygon_area(std::span<const Vec3>(p.data(), c.size));
    if (!(areas[ci] > 0.0)) {
      fail(ErrorCode::DegenerateCell, "cell " + std::to_string(ci) + " has non-positive area");
    }
  }
  return areas;
}

std::vector<double> edge_lengths(const SphereMesh& mesh) {
  const auto& verts = mesh.vertices();
  std::vector<double> out;
  out.reserve(mesh.edges().size());
  for (const Edge& e : mesh.edges()) out.push_back(geodesic_distance(verts[e.a], verts[e.b]));
  return out;
}

}  // namespace otsphere
