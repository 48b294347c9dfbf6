#pragma once

// Monitor functions m > 0 prescribing mesh density, and their
// normalisation constants alpha.

#include <memory>
#include <variant>
#include <vector>

#include "otsphere/geometry.hpp"
#include "otsphere/locator.hpp"
#include "otsphere/mesh.hpp"

namespace otsphere {

namespace axisym {

struct Uniform {};

/// rho1 inside the cap theta' < theta_cap, rho2 outside.
struct TopHat {
  double rho1;
  double rho2;
  double theta_cap;
};

/// sqrt((1 - gamma^2)/2 (tanh((cap - t)/eps) + 1) + gamma^2).
struct SmoothedTopHat {
  double gamma;
  double theta_cap;
  double epsilon;
};

/// 1 + (beta/eps) sech^2((t^2 - cap^2)/eps).
struct SechRing {
  double beta;
  double theta_cap;
  double epsilon;
};

/// 1 + lambda * delta(t - cap). Not pointwise evaluable.
struct DeltaRing {
  double lambda;
  double theta_cap;
};

/// densities[i] on [breakpoints[i], breakpoints[i+1]); breakpoints span [0, pi].
struct PiecewiseConstant {
  std::vector<double> breakpoints;
  std::vector<double> densities;
};

/// 1/d*^2 with d* = d_inner for |lat| < lat_inner, d_outer for |lat| >
/// lat_outer and linear in |lat| between. Latitudes in degrees.
struct EquatorialSpacing {
  double d_inner;
  double d_outer;
  double lat_inner;
  double lat_outer;
};

}  // namespace axisym

/// A monitor depending only on the angle theta' from `axis`.
class AxisymMonitor {
 public:
  using Shape = std::variant<axisym::Uniform, axisym::TopHat, axisym::SmoothedTopHat,
                             axisym::SechRing, axisym::DeltaRing, axisym::PiecewiseConstant,
                             axisym::EquatorialSpacing>;

  /// Validates the shape parameters (ValidationError).
  AxisymMonitor(Shape shape, UnitVector axis = UnitVector(0.0, 0.0, 1.0));

  static AxisymMonitor uniform(UnitVector axis = UnitVector(0.0, 0.0, 1.0));
  static AxisymMonitor top_hat(double rho1, double rho2, double theta_cap,
                               UnitVector axis = UnitVector(0.0, 0.0, 1.0));
  static AxisymMonitor smoothed_top_hat(double gamma, double theta_cap, double epsilon,
                                        UnitVector axis = UnitVector(0.0, 0.0, 1.0));
  static AxisymMonitor sech_ring(double beta, double theta_cap, double epsilon,
                                 UnitVector axis = UnitVector(0.0, 0.0, 1.0));
  static AxisymMonitor delta_ring(double lambda, double theta_cap,
                                  UnitVector axis = UnitVector(0.0, 0.0, 1.0));
  static AxisymMonitor piecewise_constant(std::vector<double> breakpoints,
                                          std::vector<double> densities,
                                          UnitVector axis = UnitVector(0.0, 0.0, 1.0));
  static AxisymMonitor equatorial_spacing(double d_inner = 0.064, double d_outer = 0.23,
                                          double lat_inner = 13.0, double lat_outer = 31.0,
                                          UnitVector axis = UnitVector(0.0, 0.0, 1.0));

  const Shape& shape() const noexcept { return shape_; }
  const UnitVector& axis() const noexcept { return axis_; }

  template <typename T>
  const T* as() const noexcept {
    return std::get_if<T>(&shape_);
  }

  bool pointwise() const noexcept { return !std::holds_alternative<axisym::DeltaRing>(shape_); }

  /// Colatitudes in (0, pi) where m is discontinuous or changes rapidly;
  /// used to split quadrature panels.
  std::vector<double> breakpoints() const;

  /// Lower bound of m over [0, pi].
  double min_density() const;

 private:
  Shape shape_;
  UnitVector axis_;
};

/// m(theta'). NotPointwise for DeltaRing, DomainError outside [0, pi].
double eval_axisym(const AxisymMonitor& m, double theta_prime);

/// The same formula without the [0, pi] domain check (used for planar
/// discs of other radii). NotPointwise for DeltaRing.
double eval_profile(const AxisymMonitor& m, double t);

/// alpha = (1/2) int_0^pi m(t) sin t dt; closed form where available.
double alpha_axisym(const AxisymMonitor& m);

namespace general {

/// prod_i (1 + alpha_i sech^2(beta_i (|x - axis_i|^2 - (pi/2)^2))).
struct RingTerm {
  double alpha;
  double beta;
  UnitVector axis;
};
struct CrossRings {
  std::vector<RingTerm> terms;
};

/// 1 + alpha sech(beta (lat - (theta_c + theta_a/2 sin(k lon)))), with
/// latitude measured from the equator of the global z axis.
struct SinusoidalBand {
  double alpha;
  double beta;
  double theta_c;
  double theta_a;
  int k;
};

/// Piecewise constant on the cells of a computational mesh.
struct CellwiseData {
  CellwiseData(SphereMesh mesh, std::vector<double> values);
  CellwiseData(const CellwiseData&) = delete;
  CellwiseData& operator=(const CellwiseData&) = delete;

  SphereMesh mesh;
  std::vector<double> values;
  std::vector<double> areas;
  CellLocator locator;
};
struct CellwiseComputational {
  std::shared_ptr<const CellwiseData> data;
};

struct WrappedAxisym {
  AxisymMonitor inner;
};

}  // namespace general

class GeneralMonitor {
 public:
  using Shape = std::variant<general::CrossRings, general::SinusoidalBand,
                             general::CellwiseComputational, general::WrappedAxisym>;

  explicit GeneralMonitor(Shape shape);

  static GeneralMonitor cross_rings(std::vector<general::RingTerm> terms);
  /// The two-ring configuration crossing at 60 degrees.
  static GeneralMonitor default_cross();
  static GeneralMonitor sinusoidal_band(double alpha, double beta, double theta_c,
                                        double theta_a, int k);
  static GeneralMonitor cellwise(SphereMesh mesh, std::vector<double> values);
  static GeneralMonitor wrap(AxisymMonitor inner);

  const Shape& shape() const noexcept { return shape_; }

  template <typename T>
  const T* as() const noexcept {
    return std::get_if<T>(&shape_);
  }

 private:
  Shape shape_;
};

/// m(x). CellNotFound when a cellwise monitor cannot locate x.
double eval_general(const GeneralMonitor& m, const UnitVector& x);

/// alpha = (1/4 pi) int_{S^2} m dA. Cellwise monitors sum m_c A_c directly;
/// everything else uses a Gauss-Legendre (cos theta) x trapezoid (phi)
/// product rule refined until two levels agree to 1e-8.
double alpha_general(const GeneralMonitor& m);

/// alpha for m(xi) r(xi) = alpha with m given in computational
/// coordinates: 4 pi / int (1/m) dA.
double alpha_computational(const GeneralMonitor& m);

}  // namespace otsphere
