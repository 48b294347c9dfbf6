#pragma once

// Equidistribution m(x) r = alpha with the optimal-transport map
// x = exp_xi(grad u), solved for u on a cell-centred latitude-longitude grid
// about a chosen axis.

#include <optional>
#include <utility>
#include <vector>

#include "otsphere/mesh.hpp"
#include "otsphere/monitors.hpp"
#include "otsphere/parallel.hpp"

namespace otsphere {

/// u on nodes theta_j = (j + 1/2) pi / n_theta, phi_k = 2 pi k / n_phi in
/// the azimuth frame of `axis`, stored row-major (j * n_phi + k).
class PotentialGrid {
 public:
  /// ValidationError unless n_theta >= 8 and n_phi >= 8 is even.
  PotentialGrid(UnitVector axis, int n_theta, int n_phi);

  const UnitVector& axis() const noexcept { return axis_; }
  const AxisFrame& frame() const noexcept { return frame_; }
  int n_theta() const noexcept { return n_theta_; }
  int n_phi() const noexcept { return n_phi_; }
  double d_theta() const noexcept { return d_theta_; }
  double d_phi() const noexcept { return d_phi_; }
  double theta(int j) const noexcept { return (j + 0.5) * d_theta_; }
  double phi(int k) const noexcept { return k * d_phi_; }
  UnitVector node(int j, int k) const;

  std::vector<double>& values() noexcept { return u_; }
  const std::vector<double>& values() const noexcept { return u_; }
  double& at(int j, int k) { return u_[static_cast<std::size_t>(j) * n_phi_ + k]; }
  double at(int j, int k) const { return u_[static_cast<std::size_t>(j) * n_phi_ + k]; }

  /// Value at any integer index: periodic in k, rows beyond a pole are
  /// reflected onto the opposite meridian.
  double extended(int j, int k) const;

  /// Area-weighted (sin theta_j) mean.
  double weighted_mean() const;
  /// Subtracts the weighted mean.
  void regauge();

 private:
  UnitVector axis_;
  AxisFrame frame_;
  int n_theta_;
  int n_phi_;
  double d_theta_;
  double d_phi_;
  std::vector<double> u_;
};

struct SolveReport {
  int iterations = 0;
  /// max |m r - alpha| / alpha and its grid L2 mean.
  double max_residual = 0.0;
  double l2_residual = 0.0;
  double alpha = 1.0;
  bool converged = false;
  double min_area_ratio = 1.0;
  double final_step = 0.0;
  UnitVector axis;
};

/// Compact: the finite-volume Laplace-Beltrami stencil. Wide: centred
/// divergence of the centred gradient, the linearisation of the residual.
enum class PoissonStencil { Compact, Wide };

struct SolverParams {
  int n_theta = 256;
  int n_phi = 512;
  double tol = 1e-3;
  int max_iter = 1500;
  /// Relaxation step; halved whenever a step would fold the map.
  double step = 0.5;
  /// Grid pole; chosen automatically when empty.
  std::optional<UnitVector> axis;
  PoissonStencil preconditioner = PoissonStencil::Compact;
  Exec exec = Exec::Parallel;
};

/// exp_xi(grad u(xi)) with u interpolated bicubically (Catmull-Rom).
/// PoleProximity when xi is within sin(theta) < 1e-9 of a grid pole.
UnitVector map_from_potential(const PotentialGrid& u, const UnitVector& xi);

/// As map_from_potential, but near the grid poles grad u is taken from
/// centred differences of the interpolant in a local tangent frame.
UnitVector map_point(const PotentialGrid& u, const UnitVector& xi);

struct ResidualField {
  /// m(x(xi)) r(xi) - alpha per node.
  std::vector<double> values;
  /// Area ratio r per node.
  std::vector<double> area_ratio;
  /// Image x(xi) per node.
  std::vector<UnitVector> image;
};

/// Node-wise m(x) r - alpha with r = ((x_theta x x_phi) . x) / sin(theta)
/// from centred differences. FoldDetected when some r <= 0.
ResidualField residual(const PotentialGrid& u, const GeneralMonitor& m, double alpha,
                       Exec exec = Exec::Parallel);

/// Same but with m sampled at the computational nodes (not at x).
ResidualField residual_computational(const PotentialGrid& u, const std::vector<double>& m_nodes,
                                     double alpha, Exec exec = Exec::Parallel);

/// Grid pole used when SolverParams::axis is empty: the axis of a wrapped
/// axisymmetric monitor, otherwise the cube direction (of 26) whose polar
/// caps (theta < 0.15) see the least monitor variation.
UnitVector choose_solve_axis(const GeneralMonitor& m);

/// Solves Lap v = f - mean(f) on the grid (zero weighted mean), FFT in phi
/// and a banded solve per mode.
class GridPoisson {
 public:
  GridPoisson(int n_theta, int n_phi, PoissonStencil stencil = PoissonStencil::Compact);
  ~GridPoisson();
  GridPoisson(const GridPoisson&) = delete;
  GridPoisson& operator=(const GridPoisson&) = delete;

  void solve(const std::vector<double>& f, std::vector<double>& v, Exec exec = Exec::Parallel);

  /// The stencil applied to v.
  std::vector<double> apply(const std::vector<double>& v) const;

 private:
  struct Impl;
  Impl* impl_;
};

struct SolveResult {
  PotentialGrid potential;
  SolveReport report;
};

/// Laplacian-preconditioned relaxation u <- u - step Lap^{-1}(m r / alpha - 1)
/// from u = 0 with alpha = alpha_general(m). Returns the best iterate with
/// converged = false if tol is not met in max_iter steps; FoldDetected if the
/// step cannot be made small enough to avoid folding. ValidationError for
/// tol < 1e-6.
SolveResult solve_general(const GeneralMonitor& m, const SolverParams& params = {});

/// The computational-coordinate variant m(xi) r(xi) = alpha, alpha =
/// alpha_computational(m).
SolveResult solve_computational(const GeneralMonitor& m, const SolverParams& params = {});

/// Maps every vertex through map_point; connectivity unchanged.
SphereMesh map_mesh(const PotentialGrid& u, const SphereMesh& mesh, Exec exec = Exec::Parallel);

std::pair<SphereMesh, SolveReport> adapt_mesh(const GeneralMonitor& m, const SphereMesh& mesh,
                                              const SolverParams& params = {});

/// Equalises cell areas: cellwise monitor proportional to the unadjusted
/// areas, computational-coordinate solve, vertices mapped.
std::pair<SphereMesh, SolveReport> equalize_mesh(const SphereMesh& mesh,
                                                 const SolverParams& params = {});

}  // namespace otsphere
