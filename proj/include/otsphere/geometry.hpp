#pragma once

// Geometry on the unit sphere S^2 embedded in R^3: unit/tangent vectors,
// spherical coordinates about an arbitrary axis, local frames and the
// exponential map.

#include <Eigen/Core>
#include <Eigen/Geometry>

#include "otsphere/error.hpp"

namespace otsphere {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;

/// A point on S^2. Construction always normalizes, so |v| = 1 to round-off.
class UnitVector {
 public:
  UnitVector() : v_(0.0, 0.0, 1.0) {}
  explicit UnitVector(const Vec3& v);
  UnitVector(double x, double y, double z) : UnitVector(Vec3(x, y, z)) {}

  const Vec3& vec() const noexcept { return v_; }
  double x() const noexcept { return v_.x(); }
  double y() const noexcept { return v_.y(); }
  double z() const noexcept { return v_.z(); }

  double dot(const UnitVector& o) const noexcept { return v_.dot(o.v_); }
  UnitVector operator-() const { return UnitVector(-v_); }

 private:
  Vec3 v_;
};

/// A tangent vector `v` at `base`; |v| is an arc length in radians.
struct TangentVector {
  TangentVector(const UnitVector& base, const Vec3& v);

  /// Removes the normal component of `v` first.
  static TangentVector project(const UnitVector& base, const Vec3& v);

  UnitVector base;
  Vec3 v;
};

/// Colatitude theta in [0, pi] and azimuth phi in [-pi, pi].
struct SphericalAngles {
  double theta = 0.0;
  double phi = 0.0;
};

/// Right-handed orthonormal frame (e1, e2, axis) used to measure azimuth.
struct AxisFrame {
  Vec3 e1;
  Vec3 e2;
  Vec3 axis;
};

/// Completes `axis` by Gram-Schmidt against the global x axis, falling back
/// to the y axis when |axis . x| > 0.9.
AxisFrame azimuth_frame(const UnitVector& axis);

struct LocalFrame {
  Vec3 e_theta;
  Vec3 e_phi;
};

SphericalAngles spherical_from_axis(const UnitVector& p, const UnitVector& axis);

UnitVector point_from_spherical(const SphericalAngles& angles, const AxisFrame& frame);

/// e_theta = (cos(theta) p - axis) / sin(theta), e_phi = -(p x axis) / sin(theta).
/// Throws DegenerateFrame when sin(theta) < 1e-12.
LocalFrame local_frame(const UnitVector& p, const UnitVector& axis);

/// cos(d) base + sin(d)/d v with d = |v|.
UnitVector exp_map(const TangentVector& g);

/// Moves p along its meridian about `axis` to colatitude theta_new; the
/// azimuth is unchanged and the poles of `axis` are fixed points.
UnitVector axisym_displace(const UnitVector& p, const UnitVector& axis, double theta_new);

/// Great-circle distance, clamped so that it is always in [0, pi].
double geodesic_distance(const UnitVector& a, const UnitVector& b);

/// Wraps an angle to [-pi, pi].
double wrap_angle(double phi);

/// sin(d)/d with its series below d = 1e-8.
double sinc(double d);

}  // namespace otsphere
