#include "otsphere/monitors.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "otsphere/numerics.hpp"

namespace otsphere {

namespace {

constexpr double kPi = std::numbers::pi;

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

void require(bool ok, const std::string& what) {
  if (!ok) fail(ErrorCode::ValidationError, what);
}

double sech(double z) {
  const double a = std::abs(z);
  if (a > 700.0) return 0.0;
  return 1.0 / std::cosh(a);
}

void validate(const AxisymMonitor::Shape& shape) {
  std::visit(
      overloaded{
          [](const axisym::Uniform&) {},
          [](const axisym::TopHat& s) {
            require(s.rho1 > 0.0 && s.rho2 > 0.0, "tophat densities must be positive");
            require(s.theta_cap > 0.0 && s.theta_cap < kPi, "theta_cap must lie in (0, pi)");
          },
          [](const axisym::SmoothedTopHat& s) {
            require(s.gamma > 0.0 && s.gamma <= 1.0, "gamma must lie in (0, 1]");
            require(s.theta_cap > 0.0 && s.theta_cap < kPi, "theta_cap must lie in (0, pi)");
            require(s.epsilon > 0.0, "epsilon must be positive");
          },
          [](const axisym::SechRing& s) {
            require(s.beta > 0.0, "beta must be positive");
            require(s.theta_cap > 0.0 && s.theta_cap < kPi, "theta_cap must lie in (0, pi)");
            require(s.epsilon > 0.0, "epsilon must be positive");
          },
          [](const axisym::DeltaRing& s) {
            require(s.lambda > 0.0, "lambda must be positive");
            require(s.theta_cap > 0.0 && s.theta_cap < kPi, "theta_cap must lie in (0, pi)");
          },
          [](const axisym::PiecewiseConstant& s) {
            require(!s.densities.empty(), "piecewise monitor needs at least one density");
            require(s.breakpoints.size() == s.densities.size() + 1,
                    "piecewise monitor needs one more breakpoint than densities");
            require(s.breakpoints.front() == 0.0, "first breakpoint must be 0");
            require(std::abs(s.breakpoints.back() - kPi) < 1e-12, "last breakpoint must be pi");
            for (std::size_t i = 0; i + 1 < s.breakpoints.size(); ++i) {
              require(s.breakpoints[i] < s.breakpoints[i + 1], "breakpoints must increase");
            }
            for (double d : s.densities) require(d > 0.0, "densities must be positive");
          },
          [](const axisym::EquatorialSpacing& s) {
            require(s.d_inner > 0.0 && s.d_outer > 0.0, "target spacings must be positive");
            require(s.lat_inner >= 0.0 && s.lat_inner < s.lat_outer && s.lat_outer <= 90.0,
                    "latitudes must satisfy 0 <= lat_inner < lat_outer <= 90");
          },
      },
      shape);
}

double equatorial_spacing(const axisym::EquatorialSpacing& s, double theta_prime) {
  const double lat = std::abs(90.0 - theta_prime * 180.0 / kPi);
  if (lat < s.lat_inner) return s.d_inner;
  if (lat > s.lat_outer) return s.d_outer;
  return s.d_inner + (lat - s.lat_inner) / (s.lat_outer - s.lat_inner) * (s.d_outer - s.d_inner);
}

}  // namespace

AxisymMonitor::AxisymMonitor(Shape shape, UnitVector axis)
    : shape_(std::move(shape)), axis_(axis) {
  validate(shape_);
}

AxisymMonitor AxisymMonitor::uniform(UnitVector axis) { return {axisym::Uniform{}, axis}; }

AxisymMonitor AxisymMonitor::top_hat(double rho1, double rho2, double theta_cap, UnitVector axis) {
  return {axisym::TopHat{rho1, rho2, theta_cap}, axis};
}

AxisymMonitor AxisymMonitor::smoothed_top_hat(double gamma, double theta_cap, double epsilon,
                                              UnitVector axis) {
  return {axisym::SmoothedTopHat{gamma, theta_cap, epsilon}, axis};
}

AxisymMonitor AxisymMonitor::sech_ring(double beta, double theta_cap, double epsilon,
                                       UnitVector axis) {
  return {axisym::SechRing{beta, theta_cap, epsilon}, axis};
}

AxisymMonitor AxisymMonitor::delta_ring(double lambda, double theta_cap, UnitVector axis) {
  return {axisym::DeltaRing{lambda, theta_cap}, axis};
}

AxisymMonitor AxisymMonitor::piecewise_constant(std::vector<double> breakpoints,
                                                std::vector<double> densities, UnitVector axis) {
  return {axisym::PiecewiseConstant{std::move(breakpoints), std::move(densities)}, axis};
}

AxisymMonitor AxisymMonitor::equatorial_spacing(double d_inner, double d_outer, double lat_inner,
                                                double lat_outer, UnitVector axis) {
  return {axisym::EquatorialSpacing{d_inner, d_outer, lat_inner, lat_outer}, axis};
}

std::vector<double> AxisymMonitor::breakpoints() const {
  return std::visit(
      overloaded{
          [](const axisym::Uniform&) { return std::vector<double>{}; },
          [](const axisym::TopHat& s) { return std::vector<double>{s.theta_cap}; },
          [](const axisym::SmoothedTopHat& s) { return std::vector<double>{s.theta_cap}; },
          [](const axisym::SechRing& s) { return std::vector<double>{s.theta_cap}; },
          [](const axisym::DeltaRing& s) { return std::vector<double>{s.theta_cap}; },
          [](const axisym::PiecewiseConstant& s) {
            return std::vector<double>(s.breakpoints.begin() + 1, s.breakpoints.end() - 1);
          },
          [](const axisym::EquatorialSpacing& s) {
            const double d = kPi / 180.0;
            std::vector<double> out{(90.0 - s.lat_outer) * d, (90.0 - s.lat_inner) * d,
                                    (90.0 + s.lat_inner) * d, (90.0 + s.lat_outer) * d};
            out.erase(std::remove_if(out.begin(), out.end(),
                                     [](double t) { return t <= 0.0 || t >= kPi; }),
                      out.end());
            out.erase(std::unique(out.begin(), out.end()), out.end());
            return out;
          },
      },
      shape_);
}

double AxisymMonitor::min_density() const {
  return std::visit(
      overloaded{
          [](const axisym::Uniform&) { return 1.0; },
          [](const axisym::TopHat& s) { return std::min(s.rho1, s.rho2); },
          [](const axisym::SmoothedTopHat& s) { return s.gamma; },
          [](const axisym::SechRing&) { return 1.0; },
          [](const axisym::DeltaRing&) { return 1.0; },
          [](const axisym::PiecewiseConstant& s) {
            return *std::min_element(s.densities.begin(), s.densities.end());
          },
          [](const axisym::EquatorialSpacing& s) {
            const double d = std::max(s.d_inner, s.d_outer);
            return 1.0 / (d * d);
          },
      },
      shape_);
}

double eval_axisym(const AxisymMonitor& m, double t) {
  if (!(t >= -1e-12 && t <= kPi + 1e-12)) {
    fail(ErrorCode::DomainError, "theta' = " + std::to_string(t) + " outside [0, pi]");
  }
  return eval_profile(m, std::clamp(t, 0.0, kPi));
}

double eval_profile(const AxisymMonitor& m, double t) {
  return std::visit(
      overloaded{
          [](const axisym::Uniform&) { return 1.0; },
          [t](const axisym::TopHat& s) { return t < s.theta_cap ? s.rho1 : s.rho2; },
          [t](const axisym::SmoothedTopHat& s) {
            const double g2 = s.gamma * s.gamma;
            return std::sqrt(0.5 * (1.0 - g2) * (std::tanh((s.theta_cap - t) / s.epsilon) + 1.0) +
                             g2);
          },
          [t](const axisym::SechRing& s) {
            const double q = sech((t * t - s.theta_cap * s.theta_cap) / s.epsilon);
            return 1.0 + s.beta / s.epsilon * q * q;
          },
          [](const axisym::DeltaRing&) -> double {
            fail(ErrorCode::NotPointwise, "delta ring monitor has no pointwise value");
          },
          [t](const axisym::PiecewiseConstant& s) {
            auto it = std::upper_bound(s.breakpoints.begin() + 1, s.breakpoints.end() - 1, t);
            return s.densities[static_cast<std::size_t>(it - (s.breakpoints.begin() + 1))];
          },
          [t](const axisym::EquatorialSpacing& s) {
            const double d = equatorial_spacing(s, t);
            return 1.0 / (d * d);
          },
      },
      m.shape());
}

double alpha_axisym(const AxisymMonitor& m) {
  auto by_quadrature = [&m]() {
    const auto breaks = m.breakpoints();
    const double integral = numerics::integrate_panels(
        [&m](double t) { return eval_axisym(m, t) * std::sin(t); }, 0.0, kPi, breaks, 1e-13);
    return 0.5 * integral;
  };
  return std::visit(
      overloaded{
          [](const axisym::Uniform&) { return 1.0; },
          [](const axisym::TopHat& s) {
            return 0.5 * (s.rho1 * (1.0 - std::cos(s.theta_cap)) +
                          s.rho2 * (1.0 + std::cos(s.theta_cap)));
          },
          [](const axisym::DeltaRing& s) { return 1.0 + 0.5 * s.lambda * std::sin(s.theta_cap); },
          [](const axisym::PiecewiseConstant& s) {
            double a = 0.0;
            for (std::size_t i = 0; i < s.densities.size(); ++i) {
              a += s.densities[i] * (std::cos(s.breakpoints[i]) - std::cos(s.breakpoints[i + 1]));
            }
            return 0.5 * a;
          },
          [&](const auto&) { return by_quadrature(); },
      },
      m.shape());
}

namespace general {

CellwiseData::CellwiseData(SphereMesh m, std::vector<double> v)
    : mesh(std::move(m)), values(std::move(v)), areas(cell_areas(mesh)), locator(mesh) {
  require(values.size() == mesh.cell_count(), "cellwise monitor needs one value per cell");
  for (double x : values) require(x > 0.0, "cellwise monitor values must be positive");
}

}  // namespace general

GeneralMonitor::GeneralMonitor(Shape shape) : shape_(std::move(shape)) {
  std::visit(overloaded{
                 [](const general::CrossRings& c) {
                   require(!c.terms.empty(), "cross monitor needs at least one ring");
                   for (const auto& t : c.terms) {
                     require(t.alpha > 0.0 && t.beta > 0.0, "ring alpha and beta must be positive");
                   }
                 },
                 [](const general::SinusoidalBand& s) {
                   require(s.alpha > 0.0 && s.beta > 0.0, "band alpha and beta must be positive");
                 },
                 [](const general::CellwiseComputational& c) {
                   require(c.data != nullptr, "cellwise monitor has no data");
                 },
                 [](const general::WrappedAxisym&) {},
             },
             shape_);
}

GeneralMonitor GeneralMonitor::cross_rings(std::vector<general::RingTerm> terms) {
  return GeneralMonitor(general::CrossRings{std::move(terms)});
}

GeneralMonitor GeneralMonitor::default_cross() {
  const double h = std::sqrt(3.0) / 2.0;
  return cross_rings({{5.0, 5.0, UnitVector(h, 0.0, 0.5)}, {5.0, 5.0, UnitVector(-h, 0.0, 0.5)}});
}

GeneralMonitor GeneralMonitor::sinusoidal_band(double alpha, double beta, double theta_c,
                                               double theta_a, int k) {
  return GeneralMonitor(general::SinusoidalBand{alpha, beta, theta_c, theta_a, k});
}

GeneralMonitor GeneralMonitor::cellwise(SphereMesh mesh, std::vector<double> values) {
  return GeneralMonitor(general::CellwiseComputational{
      std::make_shared<const general::CellwiseData>(std::move(mesh), std::move(values))});
}

GeneralMonitor GeneralMonitor::wrap(AxisymMonitor inner) {
  return GeneralMonitor(general::WrappedAxisym{std::move(inner)});
}

double eval_general(const GeneralMonitor& m, const UnitVector& x) {
  return std::visit(
      overloaded{
          [&x](const general::CrossRings& c) {
            constexpr double ring2 = 0.25 * kPi * kPi;
            double v = 1.0;
            for (const auto& t : c.terms) {
              const double q = sech(t.beta * ((x.vec() - t.axis.vec()).squaredNorm() - ring2));
              v *= 1.0 + t.alpha * q * q;
            }
            return v;
          },
          [&x](const general::SinusoidalBand& s) {
            const double lat = std::asin(std::clamp(x.z(), -1.0, 1.0));
            const double lon = std::atan2(x.y(), x.x());
            const double offset = lat - (s.theta_c + 0.5 * s.theta_a * std::sin(s.k * lon));
            return 1.0 + s.alpha * sech(s.beta * offset);
          },
          [&x](const general::CellwiseComputational& c) {
            const auto cell = c.data->locator.locate(x);
            if (!cell) fail(ErrorCode::CellNotFound, "point is not inside any monitor cell");
            return c.data->values[*cell];
          },
          [&x](const general::WrappedAxisym& w) {
            const double t =
                std::acos(std::clamp(x.dot(w.inner.axis()), -1.0, 1.0));
            return eval_axisym(w.inner, t);
          },
      },
      m.shape());
}

namespace {

// Product rule over S^2 in the frame of `axis`: Gauss-Legendre panels in
// cos(theta) (split at `breaks`) times the trapezoid rule in phi.
double surface_integral(const std::function<double(const UnitVector&)>& f, const UnitVector& axis,
                        const std::vector<double>& breaks, int level) {
  std::vector<double> gx, gw;
  numerics::gauss_legendre_panel(gx, gw);
  std::vector<double> edges{0.0};
  edges.insert(edges.end(), breaks.begin(), breaks.end());
  edges.push_back(kPi);
  const int per = 1 << level;
  const int n_phi = 32 << level;
  const AxisFrame frame = azimuth_frame(axis);
  double total = 0.0;
  for (std::size_t e = 0; e + 1 < edges.size(); ++e) {
    for (int p = 0; p < per; ++p) {
      const double t0 = edges[e] + (edges[e + 1] - edges[e]) * p / per;
      const double t1 = edges[e] + (edges[e + 1] - edges[e]) * (p + 1) / per;
      const double c0 = std::cos(t1), c1 = std::cos(t0);
      for (std::size_t q = 0; q < gx.size(); ++q) {
        const double c = 0.5 * (c0 + c1) + 0.5 * (c1 - c0) * gx[q];
        const double s = std::sqrt(std::max(0.0, 1.0 - c * c));
        double ring = 0.0;
        for (int k = 0; k < n_phi; ++k) {
          const double phi = 2.0 * kPi * k / n_phi;
          ring += f(UnitVector(s * std::cos(phi) * frame.e1 + s * std::sin(phi) * frame.e2 +
                               c * frame.axis));
        }
        total += 0.5 * (c1 - c0) * gw[q] * ring * (2.0 * kPi / n_phi);
      }
    }
  }
  return total;
}

double refined_surface_integral(const std::function<double(const UnitVector&)>& f,
                                const GeneralMonitor& m) {
  UnitVector axis(0.0, 0.0, 1.0);
  std::vector<double> breaks;
  if (const auto* w = m.as<general::WrappedAxisym>()) {
    if (!w->inner.pointwise()) {
      fail(ErrorCode::NotPointwise, "wrapped delta ring cannot be integrated pointwise");
    }
    axis = w->inner.axis();
    breaks = w->inner.breakpoints();
  }
  double prev = surface_integral(f, axis, breaks, 0);
  for (int level = 1; level <= 7; ++level) {
    const double cur = surface_integral(f, axis, breaks, level);
    if (std::abs(cur - prev) <= 1e-8 * std::abs(cur)) return cur;
    prev = cur;
  }
  fail(ErrorCode::QuadratureFailure, "surface quadrature did not converge to 1e-8");
}

}  // namespace

double alpha_general(const GeneralMonitor& m) {
  if (const auto* c = m.as<general::CellwiseComputational>()) {
    double total = 0.0;
    for (std::size_t i = 0; i < c->data->values.size(); ++i) {
      total += c->data->values[i] * c->data->areas[i];
    }
    return total / (4.0 * kPi);
  }
  return refined_surface_integral([&m](const UnitVector& x) { return eval_general(m, x); }, m) /
         (4.0 * kPi);
}

double alpha_computational(const GeneralMonitor& m) {
  if (const auto* c = m.as<general::CellwiseComputational>()) {
    double total = 0.0;
    for (std::size_t i = 0; i < c->data->values.size(); ++i) {
      total += c->data->areas[i] / c->data->values[i];
    }
    return 4.0 * kPi / total;
  }
  return 4.0 * kPi /
         refined_surface_integral([&m](const UnitVector& x) { return 1.0 / eval_general(m, x); }, m);
}

}  // namespace otsphere
