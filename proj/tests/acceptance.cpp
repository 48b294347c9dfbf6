// One PASS/FAIL line per acceptance criterion; exit status 1 if any fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "otsphere/axisym_map.hpp"
#include "otsphere/error.hpp"
#include "otsphere/ma_solver.hpp"
#include "otsphere/planar_radial.hpp"
#include "otsphere/quality.hpp"

using namespace otsphere;
using std::numbers::pi;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

bool near(double v, double target, double tol) { return std::abs(v - target) <= tol; }

// State shared with the fold-freedom check.
struct FoldLog {
  int solves = 0;
  int meshes = 0;
  std::vector<std::string> problems;

  void solve(const std::string& name, const SolveReport& r) {
    ++solves;
    if (r.converged && !(r.min_area_ratio > 0.0)) problems.push_back(name + " min r <= 0");
  }
  void mesh(const std::string& name, const SphereMesh& m) {
    ++meshes;
    if (!m.is_closed()) problems.push_back(name + " not closed");
    const auto a = cell_areas(m);
    if (!(*std::min_element(a.begin(), a.end()) > 0.0)) problems.push_back(name + " area <= 0");
  }
};
FoldLog folds;

SphereMap of(const AxisymMap& map) {
  return [&map](const UnitVector& p) { return map_point(map, p); };
}

// theta samples on (0, pi) plus the one-sided neighbours of `extra`.
std::vector<double> theta_samples(int n, std::initializer_list<double> extra = {}) {
  std::vector<double> t;
  for (int i = 1; i < n; ++i) t.push_back(pi * i / n);
  for (double e : extra) {
    if (!std::isfinite(e)) continue;
    t.push_back(std::nextafter(e, 0.0));
    t.push_back(std::nextafter(e, 4.0));
  }
  std::sort(t.begin(), t.end());
  return t;
}

Outcome c1() {
  const auto map = build_axisym_map(AxisymMonitor::top_hat(10, 1, pi / 4));
  const double a = map.alpha(), cap = map.cap_preimage();
  return {near(a, 2.318, 1e-3) && near(cap, 1.837, 1e-3), fmt("alpha=%.5f Theta=%.5f", a, cap)};
}

Outcome c2() {
  const auto map = build_axisym_map(AxisymMonitor::top_hat(10, 1, pi / 4));
  double qmax = 0, at = 0;
  for (double t : theta_samples(20000, {map.cap_preimage()})) {
    const double q = skewness_axisym(map, t);
    if (q > qmax) qmax = q, at = theta_prime(map, t);
  }
  const bool right = at > pi / 4 && at - pi / 4 < 1e-3;
  return {near(qmax, 2.273, 0.005) && right, fmt("max Q=%.5f at theta'=%.6f (cap %.6f)", qmax, at, pi / 4)};
}

Outcome c3() {
  const double eps = pi / 50;
  const auto map = build_axisym_map(AxisymMonitor::smoothed_top_hat(0.1, pi / 4, eps));
  double qmax = 0, qmin_tr = std::numeric_limits<double>::infinity(), at = 0;
  for (double t : theta_samples(40000)) {
    const double q = skewness_axisym(map, t), tp = theta_prime(map, t);
    qmax = std::max(qmax, q);
    if (std::abs(tp - pi / 4) < 3 * eps && q < qmin_tr) qmin_tr = q, at = tp;
  }
  return {near(qmax, 1.6, 0.05) && qmin_tr <= 1.001,
          fmt("max Q=%.4f, min Q in transition=%.6f at theta'=%.4f", qmax, qmin_tr, at)};
}

Outcome c4() {
  const auto map = build_axisym_map(AxisymMonitor::delta_ring(5, pi / 4));
  double qmax = 0;
  for (double t : theta_samples(20000, {map.theta1(), map.theta2()})) {
    if (map.in_plateau(t) || t == map.theta1() || t == map.theta2()) continue;
    const double q = skewness_axisym(map, t);
    if (std::isfinite(q)) qmax = std::max(qmax, q);
  }
  const bool ok = near(map.alpha(), 2.768, 1e-3) && near(map.theta1(), 0.464, 1e-3) &&
                  near(map.theta2(), 1.964, 1e-3) && near(qmax, 2.467, 0.005);
  return {ok, fmt("alpha=%.5f theta1=%.5f theta2=%.5f max finite Q=%.5f", map.alpha(), map.theta1(),
                  map.theta2(), qmax)};
}

Outcome c5() {
  const auto m = AxisymMonitor::sech_ring(5 * pi / 4, pi / 4, pi / 50);
  double lo = std::numeric_limits<double>::infinity(), hi = 0;
  for (int i = 0; i <= 200000; ++i) {
    const double v = eval_axisym(m, pi * i / 200000);
    lo = std::min(lo, v), hi = std::max(hi, v);
  }
  const auto map = build_axisym_map(m);
  double qmax = 0;
  for (double t : theta_samples(40000)) qmax = std::max(qmax, skewness_axisym(map, t));
  return {near(hi / lo, 63.5, 0.1) && near(qmax, 6.4, 0.2),
          fmt("max/min m=%.4f max Q=%.4f", hi / lo, qmax)};
}

std::vector<AxisymMonitor> pointwise_library() {
  return {AxisymMonitor::uniform(),
          AxisymMonitor::top_hat(10, 1, pi / 4),
          AxisymMonitor::smoothed_top_hat(0.1, pi / 4, pi / 50),
          AxisymMonitor::sech_ring(5 * pi / 4, pi / 4, pi / 50),
          AxisymMonitor::piecewise_constant({0, 0.4, 1.9, pi}, {2, 8, 0.5}),
          AxisymMonitor::equatorial_spacing()};
}

Outcome c6() {
  double worst = 0;
  for (const auto& m : pointwise_library()) {
    const auto map = build_axisym_map(m);
    for (int i = 0; i <= 400; ++i) {
      const double t = 0.02 * i / 400;
      worst = std::max({worst, skewness_axisym(map, t), skewness_axisym(map, pi - t)});
    }
  }
  return {worst <= 1.01, fmt("max pole Q=%.8f over %zu monitors", worst, pointwise_library().size())};
}

Outcome c7() {
  auto lib = pointwise_library();
  lib.push_back(AxisymMonitor::delta_ring(5, pi / 4));
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> U(0.0, pi);
  double worst = 0;
  int maps = 0;
  for (const auto& m : lib) {
    const auto map = build_axisym_map(m);
    if (map.representation() != MapRepresentation::ClosedForm) continue;
    ++maps;
    for (int i = 0; i < 10000; ++i) {
      const double t = U(rng);
      if (map.in_plateau(t)) continue;
      const double tp = theta_prime(map, t);
      // Off the ring the delta monitor is 1.
      const double mv = m.pointwise() ? eval_axisym(m, tp) : 1.0;
      auto [s1, s2] = singular_values_axisym(map, t);
      worst = std::max(worst, std::abs(s1 * s2 * mv - map.alpha()) / map.alpha());
    }
  }
  return {maps > 0 && worst <= 1e-8, fmt("max rel |s1 s2 m - alpha|=%.3e over %d closed-form maps", worst, maps)};
}

Outcome c8() {
  const auto map = build_axisym_map(AxisymMonitor::sech_ring(5 * pi / 4, pi / 4, pi / 50));
  double q[2] = {0, 0};
  for (int r : {4, 5}) {
    const auto mesh = icosahedral_mesh(r);
    const auto field = quality_field(of(map), mesh.vertices());
    for (const auto& s : field.samples)
      if (std::isfinite(s.Q)) q[r - 4] = std::max(q[r - 4], s.Q);
    const auto moved = apply_to_mesh(map, mesh);
    folds.mesh(fmt("sech ring icos%d", r), moved);
  }
  return {q[0] >= 5.0 && q[0] <= 6.4 && q[1] > q[0], fmt("max Q r4=%.4f r5=%.4f", q[0], q[1])};
}

Outcome c9() {
  const UnitVector ax(0.7, -1.0, 2.0);
  const auto inner = AxisymMonitor::smoothed_top_hat(0.1, pi / 4, pi / 50, ax);
  SolverParams p;
  p.n_theta = 256;
  p.n_phi = 512;
  const auto res = solve_general(GeneralMonitor::wrap(inner), p);
  folds.solve("smoothed top-hat", res.report);
  const auto map = build_axisym_map(inner);
  const auto f = azimuth_frame(ax);
  double err = 0;
  for (int i = 0; i <= 2000; ++i) {
    const double th = 0.05 + (pi - 0.1) * i / 2000;
    for (double ph : {0.0, 1.0, 2.5, 4.0}) {
      const UnitVector xi(std::sin(th) * std::cos(ph) * f.e1 + std::sin(th) * std::sin(ph) * f.e2 +
                          std::cos(th) * f.axis);
      const double tp = std::acos(std::clamp(map_point(res.potential, xi).dot(ax), -1.0, 1.0));
      err = std::max(err, std::abs(tp - theta_prime(map, th)));
    }
  }
  folds.mesh("smoothed top-hat icos4", map_mesh(res.potential, icosahedral_mesh(4)));
  const auto& r = res.report;
  return {r.converged && err <= 2e-3 && r.max_residual <= 1e-3,
          fmt("L-inf theta' error=%.3e residual=%.3e iterations=%d", err, r.max_residual, r.iterations)};
}

Outcome c10() {
  const auto mesh = icosahedral_mesh(4);
  auto [out, rep] = equalize_mesh(mesh);
  folds.solve("equalize", rep);
  folds.mesh("equalized icos4", out);
  const double before = mesh_stats(mesh).area_ratio, after = mesh_stats(out).area_ratio;
  return {before >= 1.8 && before <= 2.0 && after <= 1.05,
          fmt("area ratio before=%.4f after=%.4f iterations=%d", before, after, rep.iterations)};
}

Outcome c11() {
  const auto prof = AxisymMonitor::sech_ring(5 * pi / 4, pi / 4, pi / 50);
  const auto plane = build_radial_map(RadialMonitor(prof));
  const auto sphere = build_axisym_map(prof);
  std::vector<double> xp, qp, xs, qs;
  for (int i = 1; i < 20000; ++i) {
    const double t = pi * i / 20000;
    xp.push_back(radial_image(plane, t));
    qp.push_back(skewness_radial(plane, t));
    xs.push_back(theta_prime(sphere, t));
    qs.push_back(skewness_axisym(sphere, t));
  }
  const double cut = pi / 4 + 0.2;
  const double p = secondary_peak(xp, qp, cut), s = secondary_peak(xs, qs, cut);
  return {p > s, fmt("secondary peak plane=%.4f sphere=%.4f", p, s)};
}

Outcome c12() {
  const auto mesh = icosahedral_mesh(5);
  SolverParams p;
  p.preconditioner = PoissonStencil::Wide;
  auto [out, rep] = adapt_mesh(GeneralMonitor::wrap(AxisymMonitor::equatorial_spacing()), mesh, p);
  folds.solve("equatorial", rep);
  folds.mesh("equatorial icos5", out);
  const double ratio = mean_normalized_edge_length(out, 0, 13) / mean_normalized_edge_length(out, 31, 90.001);
  const double target = 0.064 / 0.23;
  return {rep.converged && std::abs(ratio / target - 1) <= 0.2,
          fmt("edge ratio=%.4f target=%.4f (band %.4f..%.4f) converged=%d", ratio, target, 0.8 * target,
              1.2 * target, rep.converged)};
}

Outcome c13() {
  // Closed-form maps: r = s1 s2 > 0 off the delta plateau.
  auto lib = pointwise_library();
  lib.push_back(AxisymMonitor::delta_ring(5, pi / 4));
  int bad = 0, n = 0;
  for (const auto& m : lib) {
    const auto map = build_axisym_map(m);
    for (double t : theta_samples(5000)) {
      if (map.in_plateau(t)) continue;
      auto [s1, s2] = singular_values_axisym(map, t);
      ++n;
      bad += !(s1 * s2 > 0.0);
    }
    if (m.pointwise()) folds.mesh("axisym icos4", apply_to_mesh(map, icosahedral_mesh(4)));
  }
  std::string d = fmt("%d/%d map samples with r<=0, %d solves, %d meshes", bad, n, folds.solves, folds.meshes);
  for (const auto& p : folds.problems) d += "; " + p;
  return {bad == 0 && folds.problems.empty() && folds.solves > 0, d};
}

}  // namespace

int main() {
  const std::vector<std::function<Outcome()>> criteria{c1, c2, c3, c4,  c5,  c6, c7,
                                                       c8, c9, c10, c11, c12, c13};
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = criteria[i]();
    } catch (const Error& e) {
      o = {false, "error " + std::string(to_string(e.code())) + ": " + e.what()};
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::printf("%s criterion %zu: %s [%.1f s]\n", o.pass ? "PASS" : "FAIL", i + 1, o.detail.c_str(), s);
    std::fflush(stdout);
    failed += !o.pass;
  }
  return failed ? 1 : 0;
}
