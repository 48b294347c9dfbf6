#include "otsphere/geometry.hpp"

#include <cmath>
#include <numbers>

namespace otsphere {

namespace {

constexpr double kFrameEps = 1e-12;
constexpr double kPoleEps = 1e-14;
constexpr double kSeriesThreshold = 1e-8;

}  // namespace

UnitVector::UnitVector(const Vec3& v) {
  const double n = v.norm();
  if (!(n > 0.0) || !std::isfinite(n)) {
    fail(ErrorCode::DomainError, "cannot normalize a zero or non-finite vector");
  }
  v_ = v / n;
}

TangentVector::TangentVector(const UnitVector& b, const Vec3& vv) : base(b), v(vv) {
  if (std::abs(v.dot(base.vec())) > 1e-10 * std::max(1.0, v.norm())) {
    fail(ErrorCode::DomainError, "tangent vector has a normal component");
  }
}

TangentVector TangentVector::project(const UnitVector& b, const Vec3& vv) {
  return TangentVector(b, vv - vv.dot(b.vec()) * b.vec());
}

double wrap_angle(double phi) {
  constexpr double pi = std::numbers::pi;
  if (phi >= -pi && phi <= pi) return phi;
  phi = std::remainder(phi, 2.0 * pi);
  return phi;
}

double sinc(double d) {
  if (std::abs(d) < kSeriesThreshold) return 1.0 - d * d / 6.0;
  return std::sin(d) / d;
}

AxisFrame azimuth_frame(const UnitVector& axis) {
  const Vec3& w = axis.vec();
  Vec3 ref = std::abs(w.x()) > 0.9 ? Vec3::UnitY() : Vec3::UnitX();
  Vec3 e1 = (ref - ref.dot(w) * w).normalized();
  Vec3 e2 = w.cross(e1);
  return {e1, e2, w};
}

SphericalAngles spherical_from_axis(const UnitVector& p, const UnitVector& axis) {
  const AxisFrame f = azimuth_frame(axis);
  const Vec3& v = p.vec();
  const double c = std::clamp(v.dot(f.axis), -1.0, 1.0);
  // atan2 of the in-plane components keeps theta accurate near the poles.
  const double a = v.dot(f.e1);
  const double b = v.dot(f.e2);
  const double s = std::hypot(a, b);
  SphericalAngles out;
  out.theta = std::atan2(s, c);
  out.phi = s < kPoleEps ? 0.0 : std::atan2(b, a);
  return out;
}

UnitVector point_from_spherical(const SphericalAngles& a, const AxisFrame& f) {
  const double st = std::sin(a.theta);
  return UnitVector(st * std::cos(a.phi) * f.e1 + st * std::sin(a.phi) * f.e2 +
                    std::cos(a.theta) * f.axis);
}

LocalFrame local_frame(const UnitVector& p, const UnitVector& axis) {
  const Vec3& x = p.vec();
  const Vec3& w = axis.vec();
  const Vec3 cr = x.cross(w);
  const double s = cr.norm();
  if (s < kFrameEps) {
    fail(ErrorCode::DegenerateFrame, "point lies on the pole of the frame axis");
  }
  const double c = x.dot(w);
  return {(c * x - w) / s, -cr / s};
}

UnitVector exp_map(const TangentVector& g) {
  const double d = g.v.norm();
  return UnitVector(std::cos(d) * g.base.vec() + sinc(d) * g.v);
}

UnitVector axisym_displace(const UnitVector& p, const UnitVector& axis, double theta_new) {
  const Vec3& x = p.vec();
  const Vec3& w = axis.vec();
  const Vec3 cr = x.cross(w);
  const double s = cr.norm();
  const double theta = std::atan2(s, x.dot(w));
  const double shift = theta_new - theta;
  if (s < kFrameEps) {
    if (std::abs(shift) < 1e-15) return p;
    fail(ErrorCode::DegenerateFrame, "cannot displace a pole of the symmetry axis");
  }
  const Vec3 e_theta = (std::cos(theta) * x - w) / s;
  return UnitVector(std::cos(shift) * x + std::sin(shift) * e_theta);
}

double geodesic_distance(const UnitVector& a, const UnitVector& b) {
  return std::atan2(a.vec().cross(b.vec()).norm(), a.dot(b));
}

}  // namespace otsphere
