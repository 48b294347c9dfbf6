#pragma once

// Discrete quality of a map S^2 -> S^2: finite-difference Jacobians
// projected onto the image tangent plane, their SVD, and mesh statistics.

#include <functional>
#include <vector>

#include "otsphere/geometry.hpp"
#include "otsphere/mesh.hpp"
#include "otsphere/parallel.hpp"

namespace otsphere {

using SphereMap = std::function<UnitVector(const UnitVector&)>;

struct QualitySample {
  UnitVector location;
  double sigma1 = 0.0;
  double sigma2 = 0.0;
  double sigma3 = 0.0;
  Vec3 u1 = Vec3::Zero();
  Vec3 u2 = Vec3::Zero();
  double s = 0.0;
  double Q = 0.0;
};

/// Columns are centred differences of `map` along an orthonormal tangent
/// pair at xi (geodesic steps of length h); the third column is zero.
/// ValidationError unless h is in [1e-6, 1e-2].
Mat3 numerical_jacobian(const SphereMap& map, const UnitVector& xi, double h = 1e-4);

/// (I - x x^T) J.
Mat3 tangent_project(const Mat3& J, const UnitVector& x);

/// SVD of a projected Jacobian. u1 is oriented so that u1 . e_theta >= 0
/// (or u1 . e_phi >= 0 when |u1 . e_theta| <= 0.1), e_theta taken at x about
/// `axis`; u2 completes a right-handed (u1, u2, x). RankDeficient when
/// sigma2 < rank_tol sigma1, ValidationError when sigma3 >= 1e-6 sigma1.
QualitySample svd_quality(const Mat3& Jp, const UnitVector& xi, const UnitVector& x,
                          const UnitVector& axis = UnitVector(0.0, 0.0, 1.0),
                          double rank_tol = 1e-12);

struct QualityField {
  std::vector<QualitySample> samples;
  /// Samples whose evaluation threw; a rank-deficient sample carries Q = +inf,
  /// any other failure Q = NaN.
  std::vector<std::size_t> failed;
  std::vector<ErrorCode> failure_codes;
};

/// `map` must be safe to call concurrently for Exec::Parallel. The rank
/// tolerance is raised to the differencing noise floor 100 eps / h.
QualityField quality_field(const SphereMap& map, const std::vector<UnitVector>& samples,
                           double h = 1e-4, const UnitVector& axis = UnitVector(0.0, 0.0, 1.0),
                           Exec exec = Exec::Parallel);

struct LatitudeBin {
  double latitude_deg;
  double mean_normalized_length;
  std::size_t count;
};

struct MeshStats {
  std::vector<double> cell_areas;
  std::vector<double> edge_lengths;
  /// Shortest over longest side of each cell.
  std::vector<double> cell_edge_ratio;
  double min_area = 0.0;
  double max_area = 0.0;
  double area_ratio = 0.0;
  double min_edge = 0.0;
  double max_edge = 0.0;
  double mean_edge = 0.0;
  /// Edge lengths over mean_edge, binned by midpoint latitude about z.
  std::vector<LatitudeBin> edge_length_by_latitude;
};

MeshStats mesh_stats(const SphereMesh& mesh, double bin_deg = 2.0);

/// Latitude (degrees, about z) of each edge midpoint, in edge order.
std::vector<double> edge_midpoint_latitudes(const SphereMesh& mesh);

/// Mean of length/mean_edge over edges with lo <= |latitude| < hi (degrees).
double mean_normalized_edge_length(const SphereMesh& mesh, double abs_lat_lo, double abs_lat_hi);

}  // namespace otsphere
