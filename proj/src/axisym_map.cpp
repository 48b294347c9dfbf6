#include "otsphere/axisym_map.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include <boost/math/interpolators/cubic_hermite.hpp>

#include "otsphere/numerics.hpp"

namespace otsphere {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
// Below this distance from a pole the derivative uses its limit sqrt(alpha/m).
constexpr double kPoleLimit = 1e-8;

double half_sin2(double t) {
  const double s = std::sin(0.5 * t);
  return 2.0 * s * s;
}
double half_cos2(double t) {
  const double c = std::cos(0.5 * t);
  return 2.0 * c * c;
}
double from_one_minus_cos(double w) { return 2.0 * std::asin(std::sqrt(std::clamp(0.5 * w, 0.0, 1.0))); }
double from_one_plus_cos(double v) { return 2.0 * std::acos(std::sqrt(std::clamp(0.5 * v, 0.0, 1.0))); }

void check_domain(double theta) {
  if (!(theta >= 0.0 && theta <= kPi)) {
    fail(ErrorCode::DomainError, "theta = " + std::to_string(theta) + " outside [0, pi]");
  }
}

}  // namespace

struct AxisymMap::Table {
  using Hermite = boost::math::interpolators::cardinal_cubic_hermite<std::vector<double>>;

  // Piecewise-constant closed form (TopHat, PiecewiseConstant).
  std::vector<double> breaks;
  std::vector<double> rho;
  std::vector<double> lower;  // C_i = int_0^{b_i} m sin
  std::vector<double> upper;  // D_i = int_{b_i}^pi m sin

  // Quadrature table.
  std::vector<double> edges;
  std::vector<double> F;
  std::vector<double> G;
  std::vector<double> gx, gw;
  std::unique_ptr<Hermite> interp;

  double partial(const AxisymMonitor& m, double a, double b) const {
    const double c = 0.5 * (a + b), h = 0.5 * (b - a);
    double s = 0.0;
    for (std::size_t q = 0; q < gx.size(); ++q) {
      const double t = c + h * gx[q];
      s += gw[q] * eval_axisym(m, t) * std::sin(t);
    }
    return h * s;
  }
  std::size_t panel_of(double t) const {
    auto it = std::upper_bound(edges.begin(), edges.end(), t);
    const auto k = static_cast<std::size_t>(std::max<std::ptrdiff_t>(it - edges.begin() - 1, 0));
    return std::min(k, edges.size() - 2);
  }
};

namespace {

struct Image {
  double theta_prime;
  double density;
};

Image piecewise_image(const AxisymMap::Table& t, double alpha, double theta) {
  const std::size_t n = t.rho.size();
  if (theta <= 0.5 * kPi) {
    const double target = alpha * half_sin2(theta);
    std::size_t i = static_cast<std::size_t>(
        std::upper_bound(t.lower.begin(), t.lower.end(), target) - t.lower.begin());
    i = std::clamp<std::size_t>(i, 1, n) - 1;
    const double w = half_sin2(t.breaks[i]) + (target - t.lower[i]) / t.rho[i];
    return {from_one_minus_cos(w), t.rho[i]};
  }
  const double target = alpha * half_cos2(theta);
  // upper is decreasing; find the interval with D_{i+1} <= target < D_i.
  std::size_t i = n - 1;
  while (i > 0 && t.upper[i] <= target) --i;
  const double v = half_cos2(t.breaks[i + 1]) + (target - t.upper[i + 1]) / t.rho[i];
  return {from_one_plus_cos(v), t.rho[i]};
}

Image image_of(const AxisymMap& map, const AxisymMap::Table* table, double theta) {
  const AxisymMonitor& m = map.monitor();
  if (m.as<axisym::Uniform>()) return {theta, 1.0};
  if (const auto* d = m.as<axisym::DeltaRing>()) {
    const double a = map.alpha();
    if (theta < map.theta1()) {
      return {from_one_minus_cos(a * half_sin2(theta)), 1.0};
    }
    if (theta > map.theta2()) {
      return {from_one_plus_cos(a * half_cos2(theta)), 1.0};
    }
    return {d->theta_cap, 1.0};
  }
  if (!table->rho.empty()) return piecewise_image(*table, map.alpha(), theta);
  const double tp = std::clamp((*table->interp)(theta), 0.0, kPi);
  return {tp, eval_axisym(m, tp)};
}

void build_piecewise(AxisymMap::Table& t, std::vector<double> breaks, std::vector<double> rho) {
  t.breaks = std::move(breaks);
  t.rho = std::move(rho);
  const std::size_t n = t.rho.size();
  t.lower.assign(n + 1, 0.0);
  t.upper.assign(n + 1, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    t.lower[i + 1] = t.lower[i] + t.rho[i] * (half_sin2(t.breaks[i + 1]) - half_sin2(t.breaks[i]));
  }
  for (std::size_t i = n; i-- > 0;) {
    t.upper[i] = t.upper[i + 1] + t.rho[i] * (half_cos2(t.breaks[i]) - half_cos2(t.breaks[i + 1]));
  }
}

double derivative_from(double alpha, double theta, const Image& im) {
  if (std::min(theta, kPi - theta) < kPoleLimit) return std::sqrt(alpha / im.density);
  return alpha * std::sin(theta) / (im.density * std::sin(im.theta_prime));
}

}  // namespace

AxisymMap build_axisym_map(const AxisymMonitor& m) {
  AxisymMap map(m);
  map.cap_preimage_ = kNaN;
  map.theta1_ = kNaN;
  map.theta2_ = kNaN;
  auto table = std::make_shared<AxisymMap::Table>();

  if (m.as<axisym::Uniform>()) {
    map.alpha_ = 1.0;
  } else if (const auto* d = m.as<axisym::DeltaRing>()) {
    map.alpha_ = alpha_axisym(m);
    const double root = std::sqrt(map.alpha_);
    map.theta1_ = 2.0 * std::asin(std::sin(0.5 * d->theta_cap) / root);
    map.theta2_ = 2.0 * std::acos(std::cos(0.5 * d->theta_cap) / root);
  } else if (const auto* th = m.as<axisym::TopHat>()) {
    map.alpha_ = alpha_axisym(m);
    build_piecewise(*table, {0.0, th->theta_cap, kPi}, {th->rho1, th->rho2});
    map.cap_preimage_ =
        2.0 * std::asin(std::sqrt(th->rho1 / map.alpha_) * std::sin(0.5 * th->theta_cap));
  } else if (const auto* pc = m.as<axisym::PiecewiseConstant>()) {
    map.alpha_ = alpha_axisym(m);
    std::vector<double> b = pc->breakpoints;
    b.back() = kPi;
    build_piecewise(*table, std::move(b), pc->densities);
  } else {
    map.rep_ = MapRepresentation::Tabulated;
    auto& t = *table;
    numerics::gauss_legendre_panel(t.gx, t.gw);
    const int n = kAxisymTableIntervals;
    for (int k = 0; k <= n; ++k) t.edges.push_back(kPi * k / n);
    for (double b : m.breakpoints()) t.edges.push_back(b);
    std::sort(t.edges.begin(), t.edges.end());
    t.edges.erase(std::unique(t.edges.begin(), t.edges.end(),
                              [](double a, double b) { return b - a < 1e-12; }),
                  t.edges.end());
    t.edges.back() = kPi;
    const std::size_t p = t.edges.size() - 1;
    std::vector<double> pieces(p);
    for (std::size_t j = 0; j < p; ++j) pieces[j] = t.partial(m, t.edges[j], t.edges[j + 1]);
    t.F.assign(p + 1, 0.0);
    t.G.assign(p + 1, 0.0);
    for (std::size_t j = 0; j < p; ++j) t.F[j + 1] = t.F[j] + pieces[j];
    for (std::size_t j = p; j-- > 0;) t.G[j] = t.G[j + 1] + pieces[j];
    if (!std::isfinite(t.F[p]) || t.F[p] <= 0.0) {
      fail(ErrorCode::QuadratureFailure, "monitor integral is not finite and positive");
    }
    map.alpha_ = 0.5 * t.F[p];
    const double alpha = map.alpha_;

    std::vector<double> nodes(n + 1), y(n + 1), dy(n + 1);
    for (int i = 0; i <= n; ++i) nodes[i] = kPi * i / n;
    y[0] = 0.0;
    y[n] = kPi;
    for (int i = 1; i < n; ++i) {
      const double theta = nodes[i];
      if (theta <= 0.5 * kPi) {
        const double target = alpha * half_sin2(theta);
        auto it = std::upper_bound(t.F.begin(), t.F.end(), target);
        const std::size_t k = std::min<std::size_t>(it - t.F.begin(), p) - 1;
        y[i] = numerics::find_root(
            [&](double s) { return t.F[k] + t.partial(m, t.edges[k], s) - target; }, t.edges[k],
            t.edges[k + 1], 1e-13);
      } else {
        const double target = alpha * half_cos2(theta);
        std::size_t k = 0;
        while (k + 1 < p && t.G[k + 1] > target) ++k;
        y[i] = numerics::find_root(
            [&](double s) { return target - t.G[k + 1] - t.partial(m, s, t.edges[k + 1]); },
            t.edges[k], t.edges[k + 1], 1e-13);
      }
    }
    for (int i = 0; i <= n; ++i) {
      dy[i] = derivative_from(alpha, nodes[i], {y[i], eval_axisym(m, y[i])});
    }
    // Fritsch-Carlson limiter: keeps the Hermite interpolant monotone.
    const double h = kPi / n;
    for (int i = 0; i < n; ++i) {
      const double delta = (y[i + 1] - y[i]) / h;
      if (delta <= 0.0) {
        dy[i] = dy[i + 1] = 0.0;
        continue;
      }
      const double a = dy[i] / delta, b = dy[i + 1] / delta;
      const double r2 = a * a + b * b;
      if (r2 > 9.0) {
        const double tau = 3.0 / std::sqrt(r2);
        dy[i] = tau * a * delta;
        dy[i + 1] = tau * b * delta;
      }
    }
    map.node_theta_ = nodes;
    map.node_theta_prime_ = y;
    t.interp = std::make_unique<AxisymMap::Table::Hermite>(std::move(y), std::move(dy), 0.0, h);
  }
  map.table_ = std::move(table);
  return map;
}

double AxisymMap::cumulative(double t) const {
  check_domain(t);
  if (monitor_.as<axisym::Uniform>()) return 1.0 - std::cos(t);
  if (const auto* d = monitor_.as<axisym::DeltaRing>()) {
    return half_sin2(t) + (t > d->theta_cap ? d->lambda * std::sin(d->theta_cap) : 0.0);
  }
  const Table& tb = *table_;
  if (!tb.rho.empty()) {
    double s = 0.0;
    for (std::size_t i = 0; i < tb.rho.size() && tb.breaks[i] < t; ++i) {
      s += tb.rho[i] * (half_sin2(std::min(t, tb.breaks[i + 1])) - half_sin2(tb.breaks[i]));
    }
    return s;
  }
  const std::size_t k = tb.panel_of(t);
  return tb.F[k] + tb.partial(monitor_, tb.edges[k], t);
}

bool AxisymMap::in_plateau(double theta) const noexcept {
  return monitor_.as<axisym::DeltaRing>() && theta > theta1_ && theta < theta2_;
}

double theta_prime(const AxisymMap& map, double theta) {
  check_domain(theta);
  if (theta == 0.0) return 0.0;
  if (theta == kPi) return kPi;
  return image_of(map, map.table_.get(), theta).theta_prime;
}

double theta_prime_derivative(const AxisymMap& map, double theta) {
  check_domain(theta);
  if (map.in_plateau(theta)) return 0.0;
  Image im = image_of(map, map.table_.get(), theta);
  if (theta == 0.0 || theta == kPi) im.theta_prime = theta;
  return derivative_from(map.alpha(), theta, im);
}

UnitVector map_point(const AxisymMap& map, const UnitVector& p) {
  const Vec3& w = map.monitor().axis().vec();
  const double s = p.vec().cross(w).norm();
  // Within 1e-12 of a pole the displacement is below that size as well.
  if (s < 1e-12) return p;
  const double theta = std::atan2(s, p.vec().dot(w));
  return axisym_displace(p, map.monitor().axis(), theta_prime(map, theta));
}

SphereMesh apply_to_mesh(const AxisymMap& map, const SphereMesh& mesh, Exec exec) {
  const auto& src = mesh.vertices();
  std::vector<UnitVector> out(src.size());
  const auto n = static_cast<std::ptrdiff_t>(src.size());
  for_each_index(n, exec, [&](std::ptrdiff_t i) { out[i] = map_point(map, src[i]); });
  return mesh.with_vertices(std::move(out));
}

std::pair<double, double> singular_values_axisym(const AxisymMap& map, double theta) {
  check_domain(theta);
  if (map.in_plateau(theta)) {
    fail(ErrorCode::NotPointwise, "singular values are undefined on the delta-ring plateau");
  }
  const double d = theta_prime_derivative(map, theta);
  if (std::min(theta, kPi - theta) < kPoleLimit) return {d, d};
  return {std::sin(theta_prime(map, theta)) / std::sin(theta), d};
}

double skewness_axisym(const AxisymMap& map, double theta) {
  check_domain(theta);
  if (map.in_plateau(theta)) return std::numeric_limits<double>::infinity();
  const auto [s1, s2] = singular_values_axisym(map, theta);
  return 0.5 * (s1 / s2 + s2 / s1);
}

}  // namespace otsphere
