#include <cmath>
#include <functional>
#include <numbers>
#include <random>

#include "doctest.h"
#include "otsphere/axisym_map.hpp"

using namespace otsphere;
using std::numbers::pi;

namespace {

std::vector<AxisymMonitor> library() {
  return {AxisymMonitor::uniform(),
          AxisymMonitor::top_hat(10, 1, pi / 4),
          AxisymMonitor::smoothed_top_hat(0.1, pi / 4, pi / 50),
          AxisymMonitor::sech_ring(5 * pi / 4, pi / 4, pi / 50),
          AxisymMonitor::delta_ring(5, pi / 4),
          AxisymMonitor::piecewise_constant({0, 0.4, 1.9, pi}, {2, 8, 0.5}),
          AxisymMonitor::equatorial_spacing()};
}

// F(t) by composite Simpson, split at the monitor breakpoints.
double F_oracle(const AxisymMonitor& m, double t) {
  std::vector<double> cuts{0.0};
  for (double b : m.breakpoints()) if (b < t) cuts.push_back(b);
  cuts.push_back(t);
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    const double a = cuts[i] + 1e-14, b = cuts[i + 1] - 1e-14;
    const int n = 4000;
    const double h = (b - a) / n;
    auto f = [&](double s) { return eval_axisym(m, s) * std::sin(s); };
    double s = f(a) + f(b);
    for (int k = 1; k < n; ++k) s += (k % 2 ? 4.0 : 2.0) * f(a + k * h);
    total += s * h / 3.0;
  }
  return total;
}

}  // namespace

TEST_CASE("top-hat constants") {
  auto map = build_axisym_map(AxisymMonitor::top_hat(10, 1, pi / 4));
  CHECK(map.representation() == MapRepresentation::ClosedForm);
  CHECK(map.alpha() == doctest::Approx(2.318).epsilon(5e-4));
  CHECK(map.cap_preimage() == doctest::Approx(1.837).epsilon(5e-4));
  // cap boundary relation rho1 tan^2(cap/2) = rho2 tan^2(Theta/2)
  CHECK(10 * std::pow(std::tan(pi / 8), 2) ==
        doctest::Approx(std::pow(std::tan(map.cap_preimage() / 2), 2)));
  CHECK(theta_prime(map, pi / 2) == doctest::Approx(std::acos(1 - map.alpha() / 10)));
  CHECK(theta_prime(map, map.cap_preimage()) == doctest::Approx(pi / 4));
}

TEST_CASE("delta ring plateau") {
  auto map = build_axisym_map(AxisymMonitor::delta_ring(5, pi / 4));
  CHECK(map.alpha() == doctest::Approx(2.768).epsilon(5e-4));
  CHECK(map.theta1() == doctest::Approx(0.464).epsilon(1e-3));
  CHECK(map.theta2() == doctest::Approx(1.964).epsilon(1e-3));
  CHECK(std::cos(map.theta1()) == doctest::Approx(1 - (1 - std::cos(pi / 4)) / map.alpha()));
  CHECK(std::cos(map.theta2()) == doctest::Approx((1 + std::cos(pi / 4)) / map.alpha() - 1));
  CHECK(theta_prime(map, 1.0) == pi / 4);
  CHECK(std::isinf(skewness_axisym(map, 1.0)));
  CHECK_THROWS_AS(singular_values_axisym(map, 1.0), Error);
  CHECK(skewness_axisym(map, map.theta2()) == doctest::Approx(2.467).epsilon(2e-3));
}

TEST_CASE("boundary conditions, monotonicity and domain") {
  for (const auto& m : library()) {
    auto map = build_axisym_map(m);
    CHECK(theta_prime(map, 0.0) == 0.0);
    CHECK(theta_prime(map, pi) == pi);
    double prev = 0.0;
    for (int i = 1; i <= 10000; ++i) {
      const double t = theta_prime(map, pi * i / 10000);
      CHECK(t >= prev);
      prev = t;
    }
    CHECK_THROWS_AS(theta_prime(map, -0.01), Error);
    CHECK_THROWS_AS(theta_prime(map, 3.2), Error);
  }
}

TEST_CASE("uniform map is the identity") {
  auto map = build_axisym_map(AxisymMonitor::uniform());
  for (double t : {0.1, 1.0, 2.5}) {
    CHECK(theta_prime(map, t) == doctest::Approx(t).epsilon(1e-14));
    auto [s1, s2] = singular_values_axisym(map, t);
    CHECK(s1 == doctest::Approx(1.0));
    CHECK(s2 == doctest::Approx(1.0));
  }
}

TEST_CASE("tabulated maps equidistribute at their nodes") {
  for (const auto& m : library()) {
    if (!m.pointwise()) continue;
    auto map = build_axisym_map(m);
    if (map.representation() != MapRepresentation::Tabulated) continue;
    CHECK(map.node_theta().size() >= 2049);
    CHECK(map.alpha() == doctest::Approx(alpha_axisym(m)).epsilon(1e-11));
    for (std::size_t i = 0; i < map.node_theta().size(); i += 97) {
      const double th = map.node_theta()[i], tp = map.node_theta_prime()[i];
      CHECK(std::abs(map.cumulative(tp) - map.alpha() * (1 - std::cos(th))) <= 1e-8);
    }
  }
}

TEST_CASE("cumulative integral agrees with an independent quadrature") {
  for (const auto& m : library()) {
    if (!m.pointwise()) continue;
    auto map = build_axisym_map(m);
    for (double t : {0.3, 0.77, 1.5, 2.9}) {
      CHECK(map.cumulative(t) == doctest::Approx(F_oracle(m, t)).epsilon(1e-9));
    }
  }
}

TEST_CASE("equidistribution with a finite-difference derivative") {
  const double h = 1e-5;
  for (const auto& m : library()) {
    if (!m.pointwise()) continue;
    auto map = build_axisym_map(m);
    for (int i = 1; i < 200; ++i) {
      const double th = pi * (i + 0.37) / 200.0;
      const double d = (theta_prime(map, th + h) - theta_prime(map, th - h)) / (2 * h);
      const double tp = theta_prime(map, th);
      const double lhs = eval_axisym(m, tp) * std::sin(tp) / std::sin(th) * d;
      bool near_break = false;
      for (double b : m.breakpoints()) near_break |= std::abs(tp - b) < 1e-3;
      if (!near_break) CHECK(lhs == doctest::Approx(map.alpha()).epsilon(1e-6));
    }
  }
}

TEST_CASE("pole skewness tends to one") {
  for (const auto& m : library()) {
    if (!m.pointwise()) continue;
    auto map = build_axisym_map(m);
    for (double t : {0.0, 1e-9, 1e-4, 0.01, pi - 0.01, pi - 1e-9, pi}) {
      CHECK(skewness_axisym(map, t) <= 1.01);
    }
  }
}

TEST_CASE("apply_to_mesh: uniform identity and top-hat cap fraction") {
  auto mesh = icosahedral_mesh(4);
  auto same = apply_to_mesh(build_axisym_map(AxisymMonitor::uniform()), mesh);
  for (std::size_t i = 0; i < mesh.vertex_count(); ++i) {
    CHECK((same.vertices()[i].vec() - mesh.vertices()[i].vec()).norm() < 1e-12);
  }
  auto m = AxisymMonitor::top_hat(10, 1, pi / 4);
  auto map = build_axisym_map(m);
  auto adapted = apply_to_mesh(map, mesh);
  std::size_t inside = 0;
  for (const auto& v : adapted.vertices()) inside += std::acos(std::clamp(v.z(), -1.0, 1.0)) < pi / 4;
  const double expected = 10 * (1 - std::cos(pi / 4)) / (2 * map.alpha());
  CHECK(static_cast<double>(inside) / adapted.vertex_count() == doctest::Approx(expected).epsilon(0.02 / expected));
  for (double a : cell_areas(adapted)) CHECK(a > 0.0);
}

TEST_CASE("apply_to_mesh about a tilted axis: serial and parallel agree") {
  UnitVector axis(0.7, -1.0, 2.0);
  auto map = build_axisym_map(AxisymMonitor::smoothed_top_hat(0.1, pi / 4, pi / 50, axis));
  auto mesh = icosahedral_mesh(3);
  auto a = apply_to_mesh(map, mesh, Exec::Serial);
  auto b = apply_to_mesh(map, mesh, Exec::Parallel);
  for (std::size_t i = 0; i < mesh.vertex_count(); ++i) {
    CHECK(a.vertices()[i].vec() == b.vertices()[i].vec());
    const double t0 = std::acos(std::clamp(mesh.vertices()[i].dot(axis), -1.0, 1.0));
    const double t1 = std::acos(std::clamp(a.vertices()[i].dot(axis), -1.0, 1.0));
    CHECK(t1 == doctest::Approx(theta_prime(map, t0)).epsilon(1e-9));
  }
}

TEST_CASE("delta ring on a cubed sphere collapses the plateau onto the ring") {
  auto map = build_axisym_map(AxisymMonitor::delta_ring(5, pi / 4));
  auto mesh = cubed_sphere_mesh(16);
  auto adapted = apply_to_mesh(map, mesh);
  for (std::size_t i = 0; i < mesh.vertex_count(); ++i) {
    const double t = std::acos(std::clamp(mesh.vertices()[i].z(), -1.0, 1.0));
    if (t >= map.theta1() && t <= map.theta2()) {
      CHECK(std::abs(std::acos(std::clamp(adapted.vertices()[i].z(), -1.0, 1.0)) - pi / 4) < 1e-10);
    }
  }
}
