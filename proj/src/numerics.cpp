#include "otsphere/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/tools/roots.hpp>
#include <boost/math/tools/toms748_solve.hpp>

#include "otsphere/error.hpp"

namespace otsphere::numerics {

double integrate(const ScalarFn& f, double a, double b, double rel_tol, double abs_floor) {
  if (a == b) return 0.0;
  double err = 0.0;
  double l1 = 0.0;
  const double value = boost::math::quadrature::gauss_kronrod<double, 31>::integrate(
      f, a, b, 20, rel_tol, &err, &l1);
  if (!std::isfinite(value) || err > rel_tol * std::max(l1, std::abs(value)) + abs_floor) {
    fail(ErrorCode::QuadratureFailure, "adaptive quadrature on [" + std::to_string(a) + ", " +
                                           std::to_string(b) + "] did not reach tolerance");
  }
  return value;
}

double integrate_panels(const ScalarFn& f, double a, double b, std::span<const double> breaks,
                        double rel_tol, double abs_floor) {
  std::vector<double> pts{a};
  for (double t : breaks) {
    if (t > a && t < b) pts.push_back(t);
  }
  pts.push_back(b);
  std::sort(pts.begin(), pts.end());
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
    total += integrate(f, pts[i], pts[i + 1], rel_tol, abs_floor);
  }
  return total;
}

double find_root(const ScalarFn& f, double lo, double hi, double x_tol) {
  const double flo = f(lo);
  if (flo == 0.0) return lo;
  const double fhi = f(hi);
  if (fhi == 0.0) return hi;
  if ((flo > 0.0) == (fhi > 0.0)) {
    fail(ErrorCode::RootBracketFailure,
         "no sign change on [" + std::to_string(lo) + ", " + std::to_string(hi) + "]");
  }
  std::uintmax_t max_iter = 200;
  auto tol = [x_tol](double x, double y) { return std::abs(x - y) <= x_tol; };
  const auto [l, h] = boost::math::tools::toms748_solve(f, lo, hi, flo, fhi, tol, max_iter);
  return 0.5 * (l + h);
}

void gauss_legendre_panel(std::vector<double>& nodes, std::vector<double>& weights) {
  using Rule = boost::math::quadrature::gauss<double, kPanelOrder>;
  const auto& x = Rule::abscissa();
  const auto& w = Rule::weights();
  nodes.clear();
  weights.clear();
  // Boost stores the nonnegative half of the symmetric rule.
  for (std::size_t i = x.size(); i-- > 0;) {
    if (x[i] == 0.0) continue;
    nodes.push_back(-x[i]);
    weights.push_back(w[i]);
  }
  for (std::size_t i = 0; i < x.size(); ++i) {
    nodes.push_back(x[i]);
    weights.push_back(w[i]);
  }
}

}  // namespace otsphere::numerics
