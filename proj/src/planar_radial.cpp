#include "otsphere/planar_radial.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include <boost/math/interpolators/cubic_hermite.hpp>

#include "otsphere/numerics.hpp"

namespace otsphere {

RadialMonitor::RadialMonitor(AxisymMonitor p, double a) : profile(std::move(p)), radius(a) {
  if (!(radius > 0.0)) fail(ErrorCode::ValidationError, "disc radius must be positive");
  if (!profile.pointwise()) fail(ErrorCode::ValidationError, "radial monitor must be pointwise");
}

struct RadialMap::Table {
  using Hermite = boost::math::interpolators::cardinal_cubic_hermite<std::vector<double>>;
  std::vector<double> edges;
  std::vector<double> H;
  std::vector<double> gx, gw;
  std::unique_ptr<Hermite> interp;

  double partial(const AxisymMonitor& m, double a, double b) const {
    const double c = 0.5 * (a + b), h = 0.5 * (b - a);
    double s = 0.0;
    for (std::size_t q = 0; q < gx.size(); ++q) {
      const double t = c + h * gx[q];
      s += gw[q] * eval_profile(m, t) * t;
    }
    return h * s;
  }
};

namespace {

double density(const RadialMap& map, double R) { return eval_profile(map.monitor().profile, R); }

}  // namespace

RadialMap build_radial_map(const RadialMonitor& m) {
  RadialMap map(m);
  auto table = std::make_shared<RadialMap::Table>();
  auto& t = *table;
  const double a = m.radius;
  numerics::gauss_legendre_panel(t.gx, t.gw);
  const int n = kRadialTableIntervals;
  for (int k = 0; k <= n; ++k) t.edges.push_back(a * k / n);
  for (double b : m.profile.breakpoints()) {
    if (b > 0.0 && b < a) t.edges.push_back(b);
  }
  std::sort(t.edges.begin(), t.edges.end());
  t.edges.erase(std::unique(t.edges.begin(), t.edges.end(),
                            [](double x, double y) { return y - x < 1e-12; }),
                t.edges.end());
  t.edges.back() = a;
  const std::size_t p = t.edges.size() - 1;
  t.H.assign(p + 1, 0.0);
  for (std::size_t j = 0; j < p; ++j) {
    t.H[j + 1] = t.H[j] + t.partial(m.profile, t.edges[j], t.edges[j + 1]);
  }
  // Cross-check the panel sum against adaptive quadrature.
  const double total = numerics::integrate_panels(
      [&](double R) { return eval_profile(m.profile, R) * R; }, 0.0, a, m.profile.breakpoints(),
      1e-10);
  if (!(std::abs(total - t.H[p]) <= 1e-9 * total)) {
    fail(ErrorCode::QuadratureFailure, "radial monitor integral did not converge");
  }
  map.alpha_ = 2.0 * t.H[p] / (a * a);
  const double alpha = map.alpha_;

  std::vector<double> r(n + 1), R(n + 1), dR(n + 1);
  for (int i = 0; i <= n; ++i) r[i] = a * i / n;
  R[0] = 0.0;
  R[n] = a;
  for (int i = 1; i < n; ++i) {
    const double target = 0.5 * alpha * r[i] * r[i];
    auto it = std::upper_bound(t.H.begin(), t.H.end(), target);
    const std::size_t k = std::min<std::size_t>(it - t.H.begin(), p) - 1;
    R[i] = numerics::find_root(
        [&](double s) { return t.H[k] + t.partial(m.profile, t.edges[k], s) - target; },
        t.edges[k], t.edges[k + 1], 1e-13);
  }
  for (int i = 0; i <= n; ++i) {
    const double mm = eval_profile(m.profile, R[i]);
    dR[i] = i == 0 ? std::sqrt(alpha / mm) : alpha * r[i] / (mm * R[i]);
  }
  const double h = a / n;
  for (int i = 0; i < n; ++i) {
    const double delta = (R[i + 1] - R[i]) / h;
    const double x = dR[i] / delta, y = dR[i + 1] / delta;
    const double r2 = x * x + y * y;
    if (r2 > 9.0) {
      const double tau = 3.0 / std::sqrt(r2);
      dR[i] = tau * x * delta;
      dR[i + 1] = tau * y * delta;
    }
  }
  map.node_r_ = r;
  map.node_R_ = R;
  t.interp = std::make_unique<RadialMap::Table::Hermite>(std::move(R), std::move(dR), 0.0, h);
  map.table_ = std::move(table);
  return map;
}

double RadialMap::cumulative(double R) const {
  const Table& t = *table_;
  auto it = std::upper_bound(t.edges.begin(), t.edges.end(), R);
  const std::size_t k =
      std::min<std::size_t>(std::max<std::ptrdiff_t>(it - t.edges.begin() - 1, 0), t.edges.size() - 2);
  return t.H[k] + t.partial(monitor_.profile, t.edges[k], R);
}

double radial_image(const RadialMap& map, double r) {
  const double a = map.monitor().radius;
  if (!(r >= 0.0 && r <= a)) {
    fail(ErrorCode::DomainError, "r = " + std::to_string(r) + " outside the disc");
  }
  if (r == 0.0) return 0.0;
  if (r == a) return a;
  return std::clamp((*map.table_->interp)(r), 0.0, a);
}

double skewness_radial(const RadialMap& map, double r) {
  const double R = radial_image(map, r);
  if (r < 1e-8 * map.monitor().radius) return 1.0;
  const double k = map.alpha() / density(map, R) * (r / R) * (r / R);
  return 0.5 * (k + 1.0 / k);
}

double secondary_peak(const std::vector<double>& x, const std::vector<double>& q, double after) {
  double best = std::numeric_limits<double>::quiet_NaN();
  for (std::size_t i = 0; i < q.size(); ++i) {
    if (x[i] > after && !(q[i] <= best)) best = q[i];
  }
  return best;
}

}  // namespace otsphere
