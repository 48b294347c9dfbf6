#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

#include "doctest.h"
#include "otsphere/locator.hpp"
#include "otsphere/mesh.hpp"

using namespace otsphere;
using std::numbers::pi;

namespace {

double total(const std::vector<double>& v) { return std::accumulate(v.begin(), v.end(), 0.0); }

double area_ratio(const SphereMesh& m) {
  auto a = cell_areas(m);
  auto [lo, hi] = std::minmax_element(a.begin(), a.end());
  return *hi / *lo;
}

}  // namespace

TEST_CASE("icosahedral meshes have Euler characteristic 2 and total area 4 pi") {
  for (int r = 0; r <= 4; ++r) {
    auto m = icosahedral_mesh(r);
    const std::size_t f = 20u << (2 * r);
    CHECK(m.cell_count() == f);
    CHECK(m.vertex_count() == 10 * (f / 20) + 2);
    CHECK(m.vertex_count() - m.edges().size() + m.cell_count() == 2);
    CHECK(m.is_closed());
    CHECK(total(cell_areas(m)) == doctest::Approx(4 * pi).epsilon(1e-12));
  }
  CHECK_THROWS_AS(icosahedral_mesh(-1), Error);
  CHECK_THROWS_AS(icosahedral_mesh(kMaxIcosahedralRefinement + 1), Error);
}

TEST_CASE("icosahedral mesh has vertices on both z poles") {
  auto m = icosahedral_mesh(2);
  int poles = 0;
  for (const auto& v : m.vertices()) poles += std::abs(std::abs(v.z()) - 1.0) < 1e-15;
  CHECK(poles == 2);
}

TEST_CASE("icosahedral area ratio grows with refinement") {
  CHECK(area_ratio(icosahedral_mesh(0)) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(area_ratio(icosahedral_mesh(4)) == doctest::Approx(1.859).epsilon(2e-3));
  CHECK(area_ratio(icosahedral_mesh(5)) == doctest::Approx(1.925).epsilon(2e-3));
}

TEST_CASE("cubed sphere and lat-lon meshes are closed") {
  auto c = cubed_sphere_mesh(6);
  CHECK(c.cell_count() == 216);
  CHECK(c.is_closed());
  CHECK(total(cell_areas(c)) == doctest::Approx(4 * pi).epsilon(1e-12));
  auto l = latlon_mesh(8, 16);
  CHECK(l.cell_count() == 8 * 16);
  CHECK(l.is_closed());
  CHECK(total(cell_areas(l)) == doctest::Approx(4 * pi).epsilon(1e-12));
}

TEST_CASE("mesh validation rejects bad connectivity") {
  std::vector<UnitVector> v{UnitVector(1, 0, 0), UnitVector(0, 1, 0), UnitVector(0, 0, 1)};
  Cell ok{{0, 1, 2, 0}, 3};
  CHECK_NOTHROW(SphereMesh(v, {ok}, MeshFamily::Custom));
  Cell oob{{0, 1, 5, 0}, 3};
  CHECK_THROWS_AS(SphereMesh(v, {oob}, MeshFamily::Custom), Error);
  Cell dup{{0, 1, 1, 0}, 3};
  CHECK_THROWS_AS(SphereMesh(v, {dup}, MeshFamily::Custom), Error);
  CHECK_THROWS_AS(SphereMesh(v, {ok, ok}, MeshFamily::Custom), Error);
  auto open = SphereMesh(v, {ok}, MeshFamily::Custom);
  CHECK_FALSE(open.is_closed());
}

TEST_CASE("octant triangle has area pi/2 with sign from orientation") {
  Vec3 a(1, 0, 0), b(0, 1, 0), c(0, 0, 1);
  CHECK(signed_triangle_area(a, b, c) == doctest::Approx(pi / 2));
  CHECK(signed_triangle_area(a, c, b) == doctest::Approx(-pi / 2));
  std::vector<Vec3> quad{Vec3(1, 0, 0), Vec3(1, 1, 0).normalized(), Vec3(0, 1, 0), Vec3(0, 0, 1)};
  CHECK(spherical_polygon_area(quad) == doctest::Approx(pi / 2));
}

TEST_CASE("edge lengths follow edge order") {
  auto m = icosahedral_mesh(0);
  auto len = edge_lengths(m);
  REQUIRE(len.size() == 30);
  for (double l : len) CHECK(l == doctest::Approx(std::atan(2.0)).epsilon(1e-12));
}

TEST_CASE("locator finds the containing cell of every cell centroid") {
  auto m = icosahedral_mesh(3);
  CellLocator loc(m);
  for (std::size_t i = 0; i < m.cell_count(); ++i) {
    Vec3 c = Vec3::Zero();
    for (auto k : m.cells()[i].indices()) c += m.vertices()[k].vec();
    auto hit = loc.locate(UnitVector(c));
    REQUIRE(hit.has_value());
    CHECK(*hit == i);
  }
  for (const auto& v : m.vertices()) CHECK(loc.locate(v).has_value());
}
