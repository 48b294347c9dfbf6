#pragma once

// Radially symmetric equidistributing maps R(r) of a disc of radius a:
// int_0^R m(t) t dt = alpha r^2 / 2 with alpha a^2 / 2 = int_0^a m(R) R dR.

#include <memory>
#include <vector>

#include "otsphere/monitors.hpp"

namespace otsphere {

/// An axisymmetric monitor profile read as m(R) on the disc [0, radius].
struct RadialMonitor {
  /// ValidationError for radius <= 0 or a DeltaRing profile.
  explicit RadialMonitor(AxisymMonitor profile, double radius = 3.14159265358979323846);

  AxisymMonitor profile;
  double radius;
};

class RadialMap {
 public:
  const RadialMonitor& monitor() const noexcept { return monitor_; }
  double alpha() const noexcept { return alpha_; }
  const std::vector<double>& node_r() const noexcept { return node_r_; }
  const std::vector<double>& node_R() const noexcept { return node_R_; }

  /// H(R) = int_0^R m(t) t dt.
  double cumulative(double R) const;

  struct Table;

 private:
  friend RadialMap build_radial_map(const RadialMonitor& m);
  friend double radial_image(const RadialMap& map, double r);

  explicit RadialMap(const RadialMonitor& m) : monitor_(m) {}

  RadialMonitor monitor_;
  double alpha_ = 1.0;
  std::vector<double> node_r_;
  std::vector<double> node_R_;
  std::shared_ptr<const Table> table_;
};

inline constexpr int kRadialTableIntervals = 8192;

RadialMap build_radial_map(const RadialMonitor& m);

/// R(r); DomainError outside [0, radius].
double radial_image(const RadialMap& map, double r);

/// (1/2)((alpha/m)(r/R)^2 + (m/alpha)(R/r)^2), with the limit 1 at r = 0.
double skewness_radial(const RadialMap& map, double r);

/// Largest q over samples with x > after (NaN if there are none).
double secondary_peak(const std::vector<double>& x, const std::vector<double>& q, double after);

}  // namespace otsphere
