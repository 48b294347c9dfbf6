#include "otsphere/quality.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <string>

#include <Eigen/SVD>

namespace otsphere {

Mat3 numerical_jacobian(const SphereMap& map, const UnitVector& xi, double h) {
  if (!(h >= 1e-6 && h <= 1e-2)) {
    fail(ErrorCode::ValidationError, "jacobian step must be in [1e-6, 1e-2], got " + std::to_string(h));
  }
  const AxisFrame f = azimuth_frame(xi);
  Mat3 J = Mat3::Zero();
  const Vec3 dirs[2] = {f.e1, f.e2};
  for (int k = 0; k < 2; ++k) {
    const UnitVector plus = map(exp_map(TangentVector(xi, h * dirs[k])));
    const UnitVector minus = map(exp_map(TangentVector(xi, -h * dirs[k])));
    J.col(k) = (plus.vec() - minus.vec()) / (2.0 * h);
  }
  return J;
}

Mat3 tangent_project(const Mat3& J, const UnitVector& x) {
  const Vec3& n = x.vec();
  Mat3 P = Mat3::Identity() - n * n.transpose();
  return P * J;
}

QualitySample svd_quality(const Mat3& Jp, const UnitVector& xi, const UnitVector& x,
                          const UnitVector& axis, double rank_tol) {
  Eigen::JacobiSVD<Mat3> svd(Jp, Eigen::ComputeFullU);
  const Vec3 sv = svd.singularValues();
  QualitySample q;
  q.location = xi;
  q.sigma1 = sv(0);
  q.sigma2 = sv(1);
  q.sigma3 = sv(2);
  if (!(q.sigma2 >= rank_tol * q.sigma1) || q.sigma1 == 0.0) {
    fail(ErrorCode::RankDeficient, "projected jacobian is rank deficient");
  }
  if (q.sigma3 >= 1e-6 * q.sigma1) {
    fail(ErrorCode::ValidationError, "jacobian has a normal component; project it first");
  }
  Vec3 u1 = svd.matrixU().col(0);
  const double c = x.dot(axis);
  if (1.0 - c * c > 1e-24) {
    const LocalFrame lf = local_frame(x, axis);
    const double a = u1.dot(lf.e_theta);
    if ((std::abs(a) > 0.1 ? a : u1.dot(lf.e_phi)) < 0.0) u1 = -u1;
  }
  q.u1 = u1;
  q.u2 = x.vec().cross(u1);
  q.s = q.sigma1 * q.sigma2;
  q.Q = 0.5 * (q.sigma1 / q.sigma2 + q.sigma2 / q.sigma1);
  return q;
}

QualityField quality_field(const SphereMap& map, const std::vector<UnitVector>& samples, double h,
                           const UnitVector& axis, Exec exec) {
  QualityField out;
  const auto n = static_cast<std::ptrdiff_t>(samples.size());
  out.samples.resize(samples.size());
  std::vector<int> code(samples.size(), -1);
  const double rank_tol = std::max(1e-12, 100.0 * std::numeric_limits<double>::epsilon() / h);
  auto one = [&](std::ptrdiff_t i) {
    try {
      const UnitVector x = map(samples[i]);
      const Mat3 Jp = tangent_project(numerical_jacobian(map, samples[i], h), x);
      out.samples[i] = svd_quality(Jp, samples[i], x, axis, rank_tol);
    } catch (const Error& e) {
      QualitySample bad;
      bad.location = samples[i];
      bad.Q = e.code() == ErrorCode::RankDeficient ? std::numeric_limits<double>::infinity()
                                                    : std::numeric_limits<double>::quiet_NaN();
      out.samples[i] = bad;
      code[i] = static_cast<int>(e.code());
    }
  };
  if (exec == Exec::Parallel) {
#pragma omp parallel for schedule(dynamic, 64)
    for (std::ptrdiff_t i = 0; i < n; ++i) one(i);
  } else {
    for (std::ptrdiff_t i = 0; i < n; ++i) one(i);
  }
  for (std::size_t i = 0; i < code.size(); ++i) {
    if (code[i] >= 0) {
      out.failed.push_back(i);
      out.failure_codes.push_back(static_cast<ErrorCode>(code[i]));
    }
  }
  return out;
}

std::vector<double> edge_midpoint_latitudes(const SphereMesh& mesh) {
  std::vector<double> lat;
  lat.reserve(mesh.edges().size());
  const auto& v = mesh.vertices();
  for (const Edge& e : mesh.edges()) {
    const Vec3 mid = (v[e.a].vec() + v[e.b].vec()).normalized();
    lat.push_back(std::asin(std::clamp(mid.z(), -1.0, 1.0)) * 180.0 / std::numbers::pi);
  }
  return lat;
}

MeshStats mesh_stats(const SphereMesh& mesh, double bin_deg) {
  MeshStats st;
  st.cell_areas = cell_areas(mesh);
  st.edge_lengths = edge_lengths(mesh);
  const auto [amin, amax] = std::minmax_element(st.cell_areas.begin(), st.cell_areas.end());
  st.min_area = *amin;
  st.max_area = *amax;
  st.area_ratio = st.max_area / st.min_area;
  const auto [emin, emax] = std::minmax_element(st.edge_lengths.begin(), st.edge_lengths.end());
  st.min_edge = *emin;
  st.max_edge = *emax;
  st.mean_edge = std::accumulate(st.edge_lengths.begin(), st.edge_lengths.end(), 0.0) /
                 static_cast<double>(st.edge_lengths.size());

  const auto& v = mesh.vertices();
  st.cell_edge_ratio.reserve(mesh.cell_count());
  for (const Cell& c : mesh.cells()) {
    double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
    for (std::size_t i = 0; i < c.size; ++i) {
      const double l = geodesic_distance(v[c.v[i]], v[c.v[(i + 1) % c.size]]);
      lo = std::min(lo, l);
      hi = std::max(hi, l);
    }
    st.cell_edge_ratio.push_back(lo / hi);
  }

  const auto lat = edge_midpoint_latitudes(mesh);
  const int nbins = static_cast<int>(std::ceil(180.0 / bin_deg));
  std::vector<double> sum(nbins, 0.0);
  std::vector<std::size_t> count(nbins, 0);
  for (std::size_t i = 0; i < lat.size(); ++i) {
    const int b = std::clamp(static_cast<int>((lat[i] + 90.0) / bin_deg), 0, nbins - 1);
    sum[b] += st.edge_lengths[i] / st.mean_edge;
    ++count[b];
  }
  for (int b = 0; b < nbins; ++b) {
    if (count[b] == 0) continue;
    st.edge_length_by_latitude.push_back(
        {-90.0 + (b + 0.5) * bin_deg, sum[b] / static_cast<double>(count[b]), count[b]});
  }
  return st;
}

double mean_normalized_edge_length(const SphereMesh& mesh, double abs_lat_lo, double abs_lat_hi) {
  const auto len = edge_lengths(mesh);
  const double mean = std::accumulate(len.begin(), len.end(), 0.0) / static_cast<double>(len.size());
  const auto lat = edge_midpoint_latitudes(mesh);
  double s = 0.0;
  std::size_t n = 0;
  for (std::size_t i = 0; i < len.size(); ++i) {
    const double a = std::abs(lat[i]);
    if (a >= abs_lat_lo && a < abs_lat_hi) {
      s += len[i] / mean;
      ++n;
    }
  }
  if (n == 0) fail(ErrorCode::DomainError, "no edges in the latitude band");
  return s / static_cast<double>(n);
}

}  // namespace otsphere
