#include "otsphere/ma_solver.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <string>

#include <fftw3.h>

namespace otsphere {

namespace {

constexpr double kPi = std::numbers::pi;
// Vertices closer than this (in sin theta) to a grid pole use tangent-plane
// differencing in map_point.
constexpr double kNearPole = 0.05;
// Per-axis subsamples when averaging a piecewise-constant monitor over a node.
constexpr int kSubsamples = 4;

struct CatmullRom {
  double w[4];
  double dw[4];
  explicit CatmullRom(double t) {
    const double t2 = t * t, t3 = t2 * t;
    w[0] = 0.5 * (-t3 + 2 * t2 - t);
    w[1] = 0.5 * (3 * t3 - 5 * t2 + 2);
    w[2] = 0.5 * (-3 * t3 + 4 * t2 + t);
    w[3] = 0.5 * (t3 - t2);
    dw[0] = 0.5 * (-3 * t2 + 4 * t - 1);
    dw[1] = 0.5 * (9 * t2 - 10 * t);
    dw[2] = 0.5 * (-9 * t2 + 8 * t + 1);
    dw[3] = 0.5 * (3 * t2 - 2 * t);
  }
};

struct Interp {
  double value;
  double d_theta;
  double d_phi;
};

Interp interpolate(const PotentialGrid& u, double theta, double phi) {
  const double s = theta / u.d_theta() - 0.5;
  const double q = phi / u.d_phi();
  const int j0 = static_cast<int>(std::floor(s));
  const int k0 = static_cast<int>(std::floor(q));
  const CatmullRom a(s - j0), b(q - k0);
  Interp out{0.0, 0.0, 0.0};
  for (int p = 0; p < 4; ++p) {
    double row = 0.0, drow = 0.0;
    for (int c = 0; c < 4; ++c) {
      const double v = u.extended(j0 - 1 + p, k0 - 1 + c);
      row += b.w[c] * v;
      drow += b.dw[c] * v;
    }
    out.value += a.w[p] * row;
    out.d_theta += a.dw[p] * row;
    out.d_phi += a.w[p] * drow;
  }
  out.d_theta /= u.d_theta();
  out.d_phi /= u.d_phi();
  return out;
}

// Catmull-Rom interpolation of the nodal centred differences u_theta and
// u_phi, i.e. of the gradient the solver itself sees at the nodes.
Interp interpolate_gradient(const PotentialGrid& u, double theta, double phi) {
  const double s = theta / u.d_theta() - 0.5;
  const double q = phi / u.d_phi();
  const int j0 = static_cast<int>(std::floor(s));
  const int k0 = static_cast<int>(std::floor(q));
  const CatmullRom a(s - j0), b(q - k0);
  Interp out{0.0, 0.0, 0.0};
  for (int p = 0; p < 4; ++p) {
    // Rows past a pole are the continuation of the same meridian, so the
    // ghost-row differences are already derivatives along it.
    const int j = j0 - 1 + p;
    for (int c = 0; c < 4; ++c) {
      const int k = k0 - 1 + c;
      const double ut = (u.extended(j + 1, k) - u.extended(j - 1, k)) / (2 * u.d_theta());
      const double up = (u.extended(j, k + 1) - u.extended(j, k - 1)) / (2 * u.d_phi());
      out.d_theta += a.w[p] * b.w[c] * ut;
      out.d_phi += a.w[p] * b.w[c] * up;
    }
  }
  return out;
}

struct GridPoint {
  double theta;
  double phi;
  double sin_theta;
  Vec3 e_theta;
  Vec3 e_phi;
};

GridPoint locate_in_grid(const PotentialGrid& u, const UnitVector& xi) {
  const AxisFrame& f = u.frame();
  const Vec3& v = xi.vec();
  const double a = v.dot(f.e1), b = v.dot(f.e2), c = v.dot(f.axis);
  const double s = std::hypot(a, b);
  GridPoint g;
  g.theta = std::atan2(s, c);
  g.phi = std::atan2(b, a);
  if (g.phi < 0.0) g.phi += 2.0 * kPi;
  g.sin_theta = s;
  const double cp = std::cos(g.phi), sp = std::sin(g.phi);
  g.e_theta = c * cp * f.e1 + c * sp * f.e2 - s * f.axis;
  g.e_phi = -sp * f.e1 + cp * f.e2;
  return g;
}

// Node geometry shared by every residual evaluation on one grid.
struct NodeGeometry {
  std::vector<UnitVector> xi;
  std::vector<Vec3> e_theta;
  std::vector<Vec3> e_phi;
  std::vector<double> sin_theta;
  // The area stencil applied to the identity map.
  std::vector<double> area0;

  explicit NodeGeometry(const PotentialGrid& g);
};

std::size_t ext_index(const PotentialGrid& g, int j, int k);
double stencil_area(const PotentialGrid& u, const std::vector<UnitVector>& x, int j, int k);

NodeGeometry::NodeGeometry(const PotentialGrid& g) {
  const std::size_t n = static_cast<std::size_t>(g.n_theta()) * g.n_phi();
  xi.resize(n);
  e_theta.resize(n);
  e_phi.resize(n);
  sin_theta.resize(n);
  const AxisFrame& f = g.frame();
  for (int j = 0; j < g.n_theta(); ++j) {
    const double st = std::sin(g.theta(j)), ct = std::cos(g.theta(j));
    for (int k = 0; k < g.n_phi(); ++k) {
      const double cp = std::cos(g.phi(k)), sp = std::sin(g.phi(k));
      const std::size_t i = static_cast<std::size_t>(j) * g.n_phi() + k;
      xi[i] = UnitVector(st * cp * f.e1 + st * sp * f.e2 + ct * f.axis);
      e_theta[i] = ct * cp * f.e1 + ct * sp * f.e2 - st * f.axis;
      e_phi[i] = -sp * f.e1 + cp * f.e2;
      sin_theta[i] = st;
    }
  }
  area0.resize(xi.size());
  for (int j = 0; j < g.n_theta(); ++j)
    for (int k = 0; k < g.n_phi(); ++k)
      area0[static_cast<std::size_t>(j) * g.n_phi() + k] = stencil_area(g, xi, j, k);
}

std::size_t ext_index(const PotentialGrid& g, int j, int k) {
  const int nt = g.n_theta(), np = g.n_phi();
  if (j < 0) {
    j = -1 - j;
    k += np / 2;
  } else if (j >= nt) {
    j = 2 * nt - 1 - j;
    k += np / 2;
  }
  k = ((k % np) + np) % np;
  return static_cast<std::size_t>(j) * np + k;
}

void compute_images(const PotentialGrid& u, const NodeGeometry& geo, std::vector<UnitVector>& x,
                    Exec exec) {
  const int nt = u.n_theta(), np = u.n_phi();
  x.resize(static_cast<std::size_t>(nt) * np);
  const auto& v = u.values();
  for_each_index(nt, exec, [&](std::ptrdiff_t jj) {
    const int j = static_cast<int>(jj);
    for (int k = 0; k < np; ++k) {
      const std::size_t i = static_cast<std::size_t>(j) * np + k;
      const double ut = (v[ext_index(u, j + 1, k)] - v[ext_index(u, j - 1, k)]) / (2 * u.d_theta());
      const double up = (v[ext_index(u, j, k + 1)] - v[ext_index(u, j, k - 1)]) / (2 * u.d_phi());
      const Vec3 grad = ut * geo.e_theta[i] + (up / geo.sin_theta[i]) * geo.e_phi[i];
      x[i] = exp_map(TangentVector(geo.xi[i], grad));
    }
  });
}

double stencil_area(const PotentialGrid& u, const std::vector<UnitVector>& x, int j, int k) {
  const Vec3 xt =
      (x[ext_index(u, j + 1, k)].vec() - x[ext_index(u, j - 1, k)].vec()) / (2 * u.d_theta());
  const Vec3 xp =
      (x[ext_index(u, j, k + 1)].vec() - x[ext_index(u, j, k - 1)].vec()) / (2 * u.d_phi());
  return xt.cross(xp).dot(x[static_cast<std::size_t>(j) * u.n_phi() + k].vec());
}

void compute_area_ratio(const PotentialGrid& u, const NodeGeometry& geo,
                        const std::vector<UnitVector>& x, std::vector<double>& r, Exec exec) {
  const int nt = u.n_theta(), np = u.n_phi();
  r.resize(x.size());
  for_each_index(nt, exec, [&](std::ptrdiff_t jj) {
    const int j = static_cast<int>(jj);
    for (int k = 0; k < np; ++k) {
      const std::size_t i = static_cast<std::size_t>(j) * np + k;
      r[i] = stencil_area(u, x, j, k) / geo.area0[i];
    }
  });
}

void check_folds(const std::vector<double>& r) {
  const auto it = std::min_element(r.begin(), r.end());
  if (!(*it > 0.0)) {
    fail(ErrorCode::FoldDetected, "area ratio " + std::to_string(*it) + " at node " +
                                      std::to_string(it - r.begin()));
  }
}

// Residual with m either evaluated at the image or given at the nodes.
ResidualField residual_impl(const PotentialGrid& u, const NodeGeometry& geo,
                            const GeneralMonitor* m, const std::vector<double>* m_nodes,
                            double alpha, Exec exec) {
  ResidualField out;
  compute_images(u, geo, out.image, exec);
  compute_area_ratio(u, geo, out.image, out.area_ratio, exec);
  check_folds(out.area_ratio);
  out.values.resize(out.image.size());
  for_each_index(static_cast<std::ptrdiff_t>(out.image.size()), exec, [&](std::ptrdiff_t i) {
    const double mv = m ? eval_general(*m, out.image[i]) : (*m_nodes)[i];
    out.values[i] = mv * out.area_ratio[i] - alpha;
  });
  return out;
}

}  // namespace

PotentialGrid::PotentialGrid(UnitVector axis, int n_theta, int n_phi)
    : axis_(axis), frame_(azimuth_frame(axis)), n_theta_(n_theta), n_phi_(n_phi) {
  if (n_theta < 8 || n_phi < 8 || n_phi % 2 != 0) {
    fail(ErrorCode::ValidationError, "grid needs n_theta >= 8 and an even n_phi >= 8");
  }
  d_theta_ = kPi / n_theta;
  d_phi_ = 2.0 * kPi / n_phi;
  u_.assign(static_cast<std::size_t>(n_theta) * n_phi, 0.0);
}

UnitVector PotentialGrid::node(int j, int k) const {
  const double st = std::sin(theta(j)), ct = std::cos(theta(j));
  return UnitVector(st * std::cos(phi(k)) * frame_.e1 + st * std::sin(phi(k)) * frame_.e2 +
                    ct * frame_.axis);
}

double PotentialGrid::extended(int j, int k) const { return u_[ext_index(*this, j, k)]; }

double PotentialGrid::weighted_mean() const {
  double s = 0.0, w = 0.0;
  for (int j = 0; j < n_theta_; ++j) {
    const double wj = std::sin(theta(j));
    double row = 0.0;
    for (int k = 0; k < n_phi_; ++k) row += at(j, k);
    s += wj * row;
    w += wj * n_phi_;
  }
  return s / w;
}

void PotentialGrid::regauge() {
  const double m = weighted_mean();
  for (double& v : u_) v -= m;
}

UnitVector map_from_potential(const PotentialGrid& u, const UnitVector& xi) {
  const GridPoint g = locate_in_grid(u, xi);
  if (g.sin_theta < 1e-9) {
    fail(ErrorCode::PoleProximity, "point is within 1e-9 of a grid pole");
  }
  const Interp it = interpolate_gradient(u, g.theta, g.phi);
  const Vec3 grad = it.d_theta * g.e_theta + (it.d_phi / g.sin_theta) * g.e_phi;
  return exp_map(TangentVector::project(xi, grad));
}

UnitVector map_point(const PotentialGrid& u, const UnitVector& xi) {
  const GridPoint g = locate_in_grid(u, xi);
  if (g.sin_theta >= kNearPole) return map_from_potential(u, xi);
  const AxisFrame f = azimuth_frame(xi);
  const double h = u.d_theta();
  Vec3 grad = Vec3::Zero();
  for (const Vec3& t : {f.e1, f.e2}) {
    const GridPoint p = locate_in_grid(u, exp_map(TangentVector(xi, h * t)));
    const GridPoint q = locate_in_grid(u, exp_map(TangentVector(xi, -h * t)));
    grad += (interpolate(u, p.theta, p.phi).value - interpolate(u, q.theta, q.phi).value) /
            (2.0 * h) * t;
  }
  return exp_map(TangentVector::project(xi, grad));
}

ResidualField residual(const PotentialGrid& u, const GeneralMonitor& m, double alpha, Exec exec) {
  const NodeGeometry geo(u);
  return residual_impl(u, geo, &m, nullptr, alpha, exec);
}

ResidualField residual_computational(const PotentialGrid& u, const std::vector<double>& m_nodes,
                                     double alpha, Exec exec) {
  if (m_nodes.size() != u.values().size()) {
    fail(ErrorCode::ValidationError, "one monitor value per grid node is required");
  }
  const NodeGeometry geo(u);
  return residual_impl(u, geo, nullptr, &m_nodes, alpha, exec);
}

UnitVector choose_solve_axis(const GeneralMonitor& m) {
  if (const auto* w = m.as<general::WrappedAxisym>()) return w->inner.axis();
  UnitVector best(0.0, 0.0, 1.0);
  double best_score = std::numeric_limits<double>::infinity();
  for (int a = -1; a <= 1; ++a) {
    for (int b = -1; b <= 1; ++b) {
      for (int c = -1; c <= 1; ++c) {
        if (a == 0 && b == 0 && c == 0) continue;
        const UnitVector axis(a, b, c);
        const AxisFrame f = azimuth_frame(axis);
        double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
        for (double sign : {1.0, -1.0}) {
          for (double t : {0.0, 0.05, 0.1, 0.15}) {
            for (int k = 0; k < 12; ++k) {
              const double phi = 2.0 * kPi * k / 12;
              const UnitVector p(std::sin(t) * std::cos(phi) * f.e1 +
                                 std::sin(t) * std::sin(phi) * f.e2 + sign * std::cos(t) * f.axis);
              const double v = eval_general(m, p);
              lo = std::min(lo, v);
              hi = std::max(hi, v);
            }
          }
        }
        const double score = (hi - lo) / (hi + lo);
        if (score < best_score - 1e-12) {
          best_score = score;
          best = axis;
        }
      }
    }
  }
  return best;
}

struct GridPoisson::Impl {
  int nt, np, nm;
  PoissonStencil stencil;
  std::vector<double> w;
  // Per mode, rows of the banded operator (offsets -2..2) and its LU factors.
  std::vector<std::array<double, 5>> op, lu;
  std::vector<char> pinned;
  std::vector<double> real_buf;
  fftw_complex* spec = nullptr;
  fftw_plan fwd = nullptr, bwd = nullptr;

  std::array<double, 5>& row(std::vector<std::array<double, 5>>& v, int m, int j) {
    return v[static_cast<std::size_t>(m) * nt + j];
  }
  void to_spectrum(const double* f) {
    std::copy(f, f + static_cast<std::size_t>(nt) * np, real_buf.begin());
    fftw_execute(fwd);
  }
  void from_spectrum(std::vector<double>& v) {
    fftw_execute(bwd);
    v.resize(real_buf.size());
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = real_buf[i] / np;
  }
};

namespace {

// Grid-row couplings of mode m: ghost rows beyond a pole are the rows on the
// opposite meridian, i.e. the mirrored row times (-1)^m.
void add_coupling(std::array<double, 5>& r, int j, int jj, int nt, int m, double v) {
  double sgn = 1.0;
  if (jj < 0) {
    jj = -1 - jj;
    sgn = m % 2 ? -1.0 : 1.0;
  } else if (jj >= nt) {
    jj = 2 * nt - 1 - jj;
    sgn = m % 2 ? -1.0 : 1.0;
  }
  r[jj - j + 2] += sgn * v;
}

}  // namespace

GridPoisson::GridPoisson(int n_theta, int n_phi, PoissonStencil stencil) : impl_(new Impl) {
  Impl& p = *impl_;
  p.nt = n_theta;
  p.np = n_phi;
  p.nm = n_phi / 2 + 1;
  p.stencil = stencil;
  const double dt = kPi / n_theta, dp = 2.0 * kPi / n_phi;
  p.w.resize(n_theta);
  for (int j = 0; j < n_theta; ++j) p.w[j] = std::sin((j + 0.5) * dt);
  p.op.assign(static_cast<std::size_t>(p.nm) * n_theta, {});
  for (int m = 0; m < p.nm; ++m) {
    const double lam = 4.0 / (dp * dp) * std::pow(std::sin(0.5 * m * dp), 2);
    for (int j = 0; j < n_theta; ++j) {
      auto& r = p.row(p.op, m, j);
      const double wj = p.w[j];
      if (stencil == PoissonStencil::Compact) {
        const double lo = j == 0 ? 0.0 : std::sin(j * dt) / (wj * dt * dt);
        const double hi = j == n_theta - 1 ? 0.0 : std::sin((j + 1) * dt) / (wj * dt * dt);
        if (j > 0) r[1] += lo;
        if (j + 1 < n_theta) r[3] += hi;
        r[2] -= lo + hi;
      } else {
        // Centred divergence of the centred gradient; |sin| in the ghost rows
        // keeps the flux across each pole antisymmetric (conservative).
        const double hi = std::abs(std::sin((j + 1.5) * dt)) / (4.0 * wj * dt * dt);
        const double lo = std::abs(std::sin((j - 0.5) * dt)) / (4.0 * wj * dt * dt);
        add_coupling(r, j, j + 2, n_theta, m, hi);
        add_coupling(r, j, j - 2, n_theta, m, lo);
        r[2] -= hi + lo;
      }
      r[2] -= lam / (wj * wj);
    }
  }
  // Banded LU without pivoting; singular modes (constants) are pinned at row 0.
  p.lu = p.op;
  p.pinned.assign(p.nm, 0);
  for (int m = 0; m < p.nm; ++m) {
    p.pinned[m] = m == 0;
    if (p.pinned[m]) p.row(p.lu, m, 0) = {0.0, 0.0, 1.0, 0.0, 0.0};
    for (int j = 0; j < n_theta; ++j) {
      auto& pj = p.row(p.lu, m, j);
      for (int i = j + 1; i <= std::min(j + 2, n_theta - 1); ++i) {
        auto& ri = p.row(p.lu, m, i);
        const double l = ri[j - i + 2] / pj[2];
        ri[j - i + 2] = l;
        for (int c = j + 1; c <= std::min(j + 2, n_theta - 1); ++c) ri[c - i + 2] -= l * pj[c - j + 2];
      }
    }
  }
  p.real_buf.resize(static_cast<std::size_t>(n_theta) * n_phi);
  p.spec = fftw_alloc_complex(static_cast<std::size_t>(p.nm) * n_theta);
  int n = n_phi;
  p.fwd = fftw_plan_many_dft_r2c(1, &n, n_theta, p.real_buf.data(), nullptr, 1, n_phi, p.spec,
                                 nullptr, 1, p.nm, FFTW_ESTIMATE);
  p.bwd = fftw_plan_many_dft_c2r(1, &n, n_theta, p.spec, nullptr, 1, p.nm, p.real_buf.data(),
                                 nullptr, 1, n_phi, FFTW_ESTIMATE);
}

GridPoisson::~GridPoisson() {
  fftw_destroy_plan(impl_->fwd);
  fftw_destroy_plan(impl_->bwd);
  fftw_free(impl_->spec);
  delete impl_;
}

namespace {

double weighted_mean(const std::vector<double>& f, const std::vector<double>& w, int np) {
  double s = 0.0, tw = 0.0;
  for (std::size_t j = 0; j < w.size(); ++j) {
    double row = 0.0;
    for (int k = 0; k < np; ++k) row += f[j * np + k];
    s += w[j] * row;
    tw += w[j] * np;
  }
  return s / tw;
}

}  // namespace

void GridPoisson::solve(const std::vector<double>& f, std::vector<double>& v, Exec exec) {
  Impl& p = *impl_;
  const double mean = weighted_mean(f, p.w, p.np);
  std::vector<double> g(f.size());
  for (std::size_t i = 0; i < f.size(); ++i) g[i] = f[i] - mean;
  p.to_spectrum(g.data());
  auto* spec = reinterpret_cast<std::complex<double>*>(p.spec);
  const int nt = p.nt, nm = p.nm;
  for_each_index(nm, exec, [&](std::ptrdiff_t mm) {
    const int m = static_cast<int>(mm);
    auto d = [&](int j) -> std::complex<double>& { return spec[static_cast<std::size_t>(j) * nm + m]; };
    if (p.pinned[m]) {
      // Project out the part of the right-hand side outside the range.
      std::complex<double> mean = 0.0;
      double tw = 0.0;
      for (int j = 0; j < nt; ++j) {
        mean += p.w[j] * d(j);
        tw += p.w[j];
      }
      mean /= tw;
      for (int j = 0; j < nt; ++j) d(j) -= mean;
      d(0) = 0.0;
    }
    for (int j = 1; j < nt; ++j) {
      const auto& r = p.row(p.lu, m, j);
      for (int c = std::max(0, j - 2); c < j; ++c) d(j) -= r[c - j + 2] * d(c);
    }
    for (int j = nt - 1; j >= 0; --j) {
      const auto& r = p.row(p.lu, m, j);
      for (int c = j + 1; c <= std::min(j + 2, nt - 1); ++c) d(j) -= r[c - j + 2] * d(c);
      d(j) /= r[2];
    }
  });
  p.from_spectrum(v);
  const double vm = weighted_mean(v, p.w, p.np);
  for (double& x : v) x -= vm;
}

std::vector<double> GridPoisson::apply(const std::vector<double>& v) const {
  Impl& p = *impl_;
  p.to_spectrum(v.data());
  auto* spec = reinterpret_cast<std::complex<double>*>(p.spec);
  const int nt = p.nt, nm = p.nm;
  std::vector<std::complex<double>> col(nt);
  for (int m = 0; m < nm; ++m) {
    for (int j = 0; j < nt; ++j) col[j] = spec[static_cast<std::size_t>(j) * nm + m];
    for (int j = 0; j < nt; ++j) {
      const auto& r = p.row(p.op, m, j);
      std::complex<double> acc = 0.0;
      for (int c = std::max(0, j - 2); c <= std::min(j + 2, nt - 1); ++c) acc += r[c - j + 2] * col[c];
      spec[static_cast<std::size_t>(j) * nm + m] = acc;
    }
  }
  std::vector<double> out;
  p.from_spectrum(out);
  return out;
}

namespace {

template <typename ResidualFn>
SolveResult relax(const UnitVector& axis, double alpha, const SolverParams& prm,
                  ResidualFn&& eval) {
  if (!(prm.tol >= 1e-6)) fail(ErrorCode::ValidationError, "solver tolerance must be >= 1e-6");
  if (prm.max_iter < 0 || !(prm.step > 0.0)) {
    fail(ErrorCode::ValidationError, "max_iter must be >= 0 and step > 0");
  }
  PotentialGrid u(axis, prm.n_theta, prm.n_phi);
  const NodeGeometry geo(u);
  GridPoisson poisson(prm.n_theta, prm.n_phi, prm.preconditioner);
  const std::size_t n = u.values().size();
  std::vector<double> weight(n);
  double wsum = 0.0;
  for (std::size_t i = 0; i < n; ++i) wsum += weight[i] = geo.sin_theta[i];

  SolveReport rep;
  rep.alpha = alpha;
  rep.axis = axis;
  double step = prm.step;
  PotentialGrid best = u;
  double best_max = std::numeric_limits<double>::infinity();
  SolveReport best_rep;

  std::vector<double> rho(n), du;
  ResidualField res = eval(u, geo);
  for (int it = 0;; ++it) {
    double mx = 0.0, l2 = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double q = res.values[i] / alpha;
      rho[i] = std::log1p(q);
      mx = std::max(mx, std::abs(q));
      l2 += weight[i] * q * q;
    }
    rep.iterations = it;
    rep.max_residual = mx;
    rep.l2_residual = std::sqrt(l2 / wsum);
    rep.min_area_ratio = *std::min_element(res.area_ratio.begin(), res.area_ratio.end());
    rep.final_step = step;
    if (mx < best_max) {
      best_max = mx;
      best = u;
      best_rep = rep;
    }
    if (mx <= prm.tol) {
      rep.converged = true;
      return {u, rep};
    }
    if (it >= prm.max_iter) break;
    poisson.solve(rho, du, prm.exec);
    const std::vector<double> prev = u.values();
    const double l2_prev = l2;
    for (;;) {
      for (std::size_t i = 0; i < n; ++i) u.values()[i] = prev[i] - step * du[i];
      bool ok = false;
      try {
        res = eval(u, geo);
        double l2_new = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
          const double q = res.values[i] / alpha;
          l2_new += weight[i] * q * q;
        }
        ok = l2_new <= 1.21 * l2_prev || step < 1e-3 * prm.step;
      } catch (const Error& e) {
        if (e.code() != ErrorCode::FoldDetected) throw;
        if (step < 1e-6 * prm.step) throw;
      }
      if (ok) break;
      step *= 0.5;
    }
  }
  best_rep.iterations = rep.iterations;
  best_rep.converged = false;
  return {best, best_rep};
}

}  // namespace

SolveResult solve_general(const GeneralMonitor& m, const SolverParams& params) {
  const UnitVector axis = params.axis ? *params.axis : choose_solve_axis(m);
  const double alpha = alpha_general(m);
  return relax(axis, alpha, params, [&](const PotentialGrid& u, const NodeGeometry& geo) {
    return residual_impl(u, geo, &m, nullptr, alpha, params.exec);
  });
}

SolveResult solve_computational(const GeneralMonitor& m, const SolverParams& params) {
  const UnitVector axis = params.axis ? *params.axis : choose_solve_axis(m);
  const double alpha = alpha_computational(m);
  PotentialGrid probe(axis, params.n_theta, params.n_phi);
  const NodeGeometry geo0(probe);
  std::vector<double> m_nodes(geo0.xi.size());
  const bool piecewise = m.as<general::CellwiseComputational>() != nullptr;
  const int sub = piecewise ? kSubsamples : 1;
  const AxisFrame& f = probe.frame();
  for_each_index(static_cast<std::ptrdiff_t>(m_nodes.size()), params.exec, [&](std::ptrdiff_t i) {
    if (sub == 1) {
      m_nodes[i] = eval_general(m, geo0.xi[i]);
      return;
    }
    // Harmonic mean over the node's control volume: conserves int 1/m,
    // which is what fixes the image area of each cell.
    const int j = static_cast<int>(i / probe.n_phi()), k = static_cast<int>(i % probe.n_phi());
    double inv = 0.0, wsum = 0.0;
    for (int a = 0; a < sub; ++a) {
      const double t = probe.theta(j) + ((a + 0.5) / sub - 0.5) * probe.d_theta();
      const double st = std::sin(t), ct = std::cos(t);
      for (int b = 0; b < sub; ++b) {
        const double p = probe.phi(k) + ((b + 0.5) / sub - 0.5) * probe.d_phi();
        const UnitVector x(st * std::cos(p) * f.e1 + st * std::sin(p) * f.e2 + ct * f.axis);
        inv += st / eval_general(m, x);
        wsum += st;
      }
    }
    m_nodes[i] = wsum / inv;
  });
  return relax(axis, alpha, params, [&](const PotentialGrid& u, const NodeGeometry& geo) {
    return residual_impl(u, geo, nullptr, &m_nodes, alpha, params.exec);
  });
}

SphereMesh map_mesh(const PotentialGrid& u, const SphereMesh& mesh, Exec exec) {
  const auto& src = mesh.vertices();
  std::vector<UnitVector> out(src.size());
  for_each_index(static_cast<std::ptrdiff_t>(src.size()), exec,
                 [&](std::ptrdiff_t i) { out[i] = map_point(u, src[i]); });
  return mesh.with_vertices(std::move(out));
}

std::pair<SphereMesh, SolveReport> adapt_mesh(const GeneralMonitor& m, const SphereMesh& mesh,
                                              const SolverParams& params) {
  auto [u, rep] = solve_general(m, params);
  return {map_mesh(u, mesh, params.exec), rep};
}

std::pair<SphereMesh, SolveReport> equalize_mesh(const SphereMesh& mesh,
                                                 const SolverParams& params) {
  if (!mesh.is_closed()) fail(ErrorCode::InvalidMesh, "equalization needs a closed mesh");
  const GeneralMonitor m = GeneralMonitor::cellwise(mesh, cell_areas(mesh));
  auto [u, rep] = solve_computational(m, params);
  return {map_mesh(u, mesh, params.exec), rep};
}

}  // namespace otsphere
