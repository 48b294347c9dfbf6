#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "doctest.h"
#include "otsphere/axisym_map.hpp"
#include "otsphere/quality.hpp"

using namespace otsphere;
using std::numbers::pi;

namespace {

SphereMap of(const AxisymMap& m) {
  return [&m](const UnitVector& p) { return map_point(m, p); };
}

std::vector<UnitVector> random_points(int n, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g;
  std::vector<UnitVector> out;
  for (int i = 0; i < n; ++i) out.emplace_back(g(rng), g(rng), g(rng));
  return out;
}

}  // namespace

TEST_CASE("identity and rotations are isometries") {
  SphereMap id = [](const UnitVector& p) { return p; };
  const Eigen::Matrix3d R = Eigen::AngleAxisd(0.8, Vec3(1, 2, 3).normalized()).toRotationMatrix();
  SphereMap rot = [R](const UnitVector& p) { return UnitVector(R * p.vec()); };
  for (const auto& xi : random_points(50, 1)) {
    for (const auto* f : {&id, &rot}) {
      const UnitVector x = (*f)(xi);
      auto q = svd_quality(tangent_project(numerical_jacobian(*f, xi), x), xi, x);
      CHECK(q.sigma1 == doctest::Approx(1.0).epsilon(1e-7));
      CHECK(q.sigma2 == doctest::Approx(1.0).epsilon(1e-7));
      CHECK(q.sigma3 < 1e-6);
      CHECK(q.Q == doctest::Approx(1.0).epsilon(1e-7));
    }
  }
  CHECK_THROWS_AS(numerical_jacobian(id, UnitVector(1, 0, 0), 1e-1), Error);
}

TEST_CASE("tangent projection") {
  std::mt19937_64 rng(5);
  std::normal_distribution<double> g;
  UnitVector x(0.3, -0.4, 0.8);
  Mat3 J;
  for (int i = 0; i < 9; ++i) J(i / 3, i % 3) = g(rng);
  const Mat3 P = tangent_project(J, x);
  CHECK((P.transpose() * x.vec()).norm() < 1e-14);
  Mat3 normal = x.vec() * Vec3(1, 2, 3).transpose();
  CHECK(tangent_project(normal, x).norm() < 1e-14);
  CHECK((tangent_project(P, x) - P).norm() < 1e-14);
}

TEST_CASE("svd quality of simple stretches") {
  UnitVector x(0, 0, 1);
  Mat3 I = Mat3::Zero();
  I(0, 0) = 1;
  I(1, 1) = 1;
  auto q = svd_quality(I, x, x, UnitVector(1, 0, 0));
  CHECK(q.Q == doctest::Approx(1.0));
  CHECK(q.s == doctest::Approx(1.0));
  Mat3 S = Mat3::Zero();
  S(0, 0) = 2;
  S(1, 1) = 0.5;
  q = svd_quality(S, x, x, UnitVector(1, 0, 0));
  CHECK(q.Q == doctest::Approx(2.125));
  CHECK(q.s == doctest::Approx(1.0));
  CHECK(std::abs(q.u1.dot(q.u2)) < 1e-12);
  CHECK(q.u1.cross(q.u2).dot(x.vec()) > 0.0);
  Mat3 R = Mat3::Zero();
  R(0, 0) = 1;
  CHECK_THROWS_AS(svd_quality(R, x, x), Error);
}

TEST_CASE("top-hat jacobian matches the analytic singular values at the equator") {
  auto map = build_axisym_map(AxisymMonitor::top_hat(10, 1, pi / 4));
  auto f = of(map);
  UnitVector xi(1, 0, 0);
  const UnitVector x = f(xi);
  auto q = svd_quality(tangent_project(numerical_jacobian(f, xi, 1e-4), x), xi, x);
  auto [a, b] = singular_values_axisym(map, pi / 2);
  CHECK(q.sigma1 == doctest::Approx(std::max(a, b)).epsilon(1e-4));
  CHECK(q.sigma2 == doctest::Approx(std::min(a, b)).epsilon(1e-4));
}

TEST_CASE("numerical and analytic skewness agree for the axisymmetric library") {
  std::vector<AxisymMonitor> lib{AxisymMonitor::top_hat(10, 1, pi / 4),
                                 AxisymMonitor::smoothed_top_hat(0.1, pi / 4, pi / 50),
                                 AxisymMonitor::sech_ring(5 * pi / 4, pi / 4, pi / 50),
                                 AxisymMonitor::delta_ring(5, pi / 4),
                                 AxisymMonitor::piecewise_constant({0, 0.4, 1.9, pi}, {2, 8, 0.5}),
                                 AxisymMonitor::equatorial_spacing()};
  const double h = 1e-4;
  for (const auto& m : lib) {
    auto map = build_axisym_map(m);
    auto pts = random_points(400, 11);
    auto field = quality_field(of(map), pts, h);
    for (std::size_t i = 0; i < pts.size(); ++i) {
      const double th = std::acos(std::clamp(pts[i].z(), -1.0, 1.0));
      const double tp = theta_prime(map, th);
      bool near = std::abs(th - map.theta1()) < 0.01 || std::abs(th - map.theta2()) < 0.01;
      for (double b : m.breakpoints()) near |= std::abs(tp - b) < 0.01;
      if (m.as<axisym::DeltaRing>()) near |= std::abs(tp - pi / 4) < 0.01;
      if (near || map.in_plateau(th)) continue;
      const auto& q = field.samples[i];
      CHECK(std::abs(q.Q - skewness_axisym(map, th)) <= std::max(1e-3, 3 * h));
      CHECK(q.sigma3 < 1e-6 * q.sigma1);
      if (m.pointwise()) CHECK(q.s * eval_axisym(m, tp) == doctest::Approx(map.alpha()).epsilon(1e-5));
      if (std::abs(q.Q - 1) >= 0.05) {
        const auto lf = local_frame(map_point(map, pts[i]), UnitVector(0, 0, 1));
        const double c = std::max(std::abs(q.u1.dot(lf.e_theta)), std::abs(q.u1.dot(lf.e_phi)));
        CHECK(c >= std::cos(5 * pi / 180));
      }
    }
  }
}

TEST_CASE("delta ring plateau samples are flagged infinite") {
  auto map = build_axisym_map(AxisymMonitor::delta_ring(5, pi / 4));
  std::vector<UnitVector> pts{UnitVector(std::sin(1.0), 0, std::cos(1.0)), UnitVector(0, 1, 0)};
  auto field = quality_field(of(map), pts);
  REQUIRE(field.failed.size() == 2);
  CHECK(std::isinf(field.samples[0].Q));
  CHECK(field.failure_codes[0] == ErrorCode::RankDeficient);
}

TEST_CASE("smoothed top-hat peaks just outside the cap") {
  auto map = build_axisym_map(AxisymMonitor::smoothed_top_hat(0.1, pi / 4, pi / 50));
  auto mesh = icosahedral_mesh(4);
  auto field = quality_field(of(map), mesh.vertices());
  std::size_t best = 0;
  for (std::size_t i = 0; i < field.samples.size(); ++i) {
    if (field.samples[i].Q > field.samples[best].Q) best = i;
  }
  const double tp = std::acos(std::clamp(map_point(map, mesh.vertices()[best]).z(), -1.0, 1.0));
  CHECK(tp > pi / 4);
  CHECK(tp < pi / 4 + 0.4);
}

TEST_CASE("serial and parallel quality fields agree") {
  auto map = build_axisym_map(AxisymMonitor::sech_ring(5 * pi / 4, pi / 4, pi / 50));
  auto pts = icosahedral_mesh(3).vertices();
  auto a = quality_field(of(map), pts, 1e-4, UnitVector(0, 0, 1), Exec::Serial);
  auto b = quality_field(of(map), pts, 1e-4, UnitVector(0, 0, 1), Exec::Parallel);
  for (std::size_t i = 0; i < pts.size(); ++i) CHECK(a.samples[i].Q == b.samples[i].Q);
}

TEST_CASE("mesh statistics") {
  auto s0 = mesh_stats(icosahedral_mesh(0));
  for (double r : s0.cell_edge_ratio) CHECK(r == doctest::Approx(1.0));
  CHECK(s0.area_ratio == doctest::Approx(1.0));
  auto s4 = mesh_stats(icosahedral_mesh(4));
  CHECK(s4.area_ratio >= 1.8);
  CHECK(s4.area_ratio <= 2.0);
  double weighted = 0;
  std::size_t n = 0;
  for (const auto& b : s4.edge_length_by_latitude) {
    weighted += b.mean_normalized_length * b.count;
    n += b.count;
  }
  CHECK(n == s4.edge_lengths.size());
  CHECK(weighted / n == doctest::Approx(1.0));
  CHECK(mean_normalized_edge_length(icosahedral_mesh(3), 0, 90.01) == doctest::Approx(1.0));
}
