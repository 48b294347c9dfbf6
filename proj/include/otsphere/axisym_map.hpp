#pragma once

// Equidistributing maps theta -> theta' for axisymmetric monitors: the
// image colatitude solves F(theta') = alpha (1 - cos theta) with
// F(t) = int_0^t m(s) sin s ds.

#include <memory>
#include <utility>
#include <vector>

#include "otsphere/mesh.hpp"
#include "otsphere/monitors.hpp"
#include "otsphere/parallel.hpp"

namespace otsphere {

enum class MapRepresentation { ClosedForm, Tabulated };

class AxisymMap {
 public:
  const AxisymMonitor& monitor() const noexcept { return monitor_; }
  double alpha() const noexcept { return alpha_; }
  MapRepresentation representation() const noexcept { return rep_; }

  /// Theta where theta' crosses the cap edge (TopHat only, else NaN).
  double cap_preimage() const noexcept { return cap_preimage_; }
  /// The DeltaRing plateau [theta1, theta2] (NaN otherwise).
  double theta1() const noexcept { return theta1_; }
  double theta2() const noexcept { return theta2_; }

  /// Table nodes (theta_i, theta'_i); empty for closed forms.
  const std::vector<double>& node_theta() const noexcept { return node_theta_; }
  const std::vector<double>& node_theta_prime() const noexcept { return node_theta_prime_; }

  /// F(t) = int_0^t m sin, exact for closed forms, panel quadrature otherwise.
  double cumulative(double theta_prime) const;

  /// True when theta lies strictly inside the DeltaRing plateau.
  bool in_plateau(double theta) const noexcept;

  friend AxisymMap build_axisym_map(const AxisymMonitor& m);
  friend double theta_prime(const AxisymMap& map, double theta);
  friend double theta_prime_derivative(const AxisymMap& map, double theta);

 /// Opaque evaluation data (defined in the implementation).
  struct Table;

 private:

  explicit AxisymMap(const AxisymMonitor& m) : monitor_(m) {}

  AxisymMonitor monitor_;
  double alpha_ = 1.0;
  MapRepresentation rep_ = MapRepresentation::ClosedForm;
  double cap_preimage_;
  double theta1_;
  double theta2_;
  std::vector<double> node_theta_;
  std::vector<double> node_theta_prime_;
  std::shared_ptr<const Table> table_;
};

inline constexpr int kAxisymTableIntervals = 8192;

/// QuadratureFailure / RootBracketFailure from the tabulation.
AxisymMap build_axisym_map(const AxisymMonitor& m);

/// Image colatitude; DomainError outside [0, pi].
double theta_prime(const AxisymMap& map, double theta);

/// d theta'/d theta = alpha sin(theta) / (m(theta') sin(theta')), with the
/// pole limit sqrt(alpha / m). Zero on the DeltaRing plateau.
double theta_prime_derivative(const AxisymMap& map, double theta);

/// Moves p along its meridian about the monitor axis to theta'(theta).
UnitVector map_point(const AxisymMap& map, const UnitVector& p);

/// Moves every vertex along its meridian about the monitor axis.
SphereMesh apply_to_mesh(const AxisymMap& map, const SphereMesh& mesh,
                         Exec exec = Exec::Parallel);

/// (sin theta' / sin theta, d theta'/d theta); NotPointwise on the plateau.
std::pair<double, double> singular_values_axisym(const AxisymMap& map, double theta);

/// (1/2)(s1/s2 + s2/s1); +infinity on the DeltaRing plateau.
double skewness_axisym(const AxisymMap& map, double theta);

}  // namespace otsphere
