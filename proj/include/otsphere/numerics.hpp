#pragma once

// Thin wrappers over Boost.Math quadrature and bracketed root finding that
// translate failures into otsphere::Error.

#include <functional>
#include <span>
#include <vector>

namespace otsphere::numerics {

using ScalarFn = std::function<double(double)>;

/// Adaptive Gauss-Kronrod (15/31) on [a, b]. Throws QuadratureFailure when
/// the error estimate exceeds rel_tol * |I| + abs_floor.
double integrate(const ScalarFn& f, double a, double b, double rel_tol = 1e-12,
                 double abs_floor = 1e-15);

/// As integrate(), split at interior `breaks` (sorted; points outside (a, b)
/// are ignored).
double integrate_panels(const ScalarFn& f, double a, double b, std::span<const double> breaks,
                        double rel_tol = 1e-12, double abs_floor = 1e-15);

/// Root of f on [lo, hi] by TOMS 748. f(lo) and f(hi) must bracket a root
/// (a zero at either end is accepted); otherwise RootBracketFailure.
double find_root(const ScalarFn& f, double lo, double hi, double x_tol = 1e-14);

inline constexpr int kPanelOrder = 20;

/// kPanelOrder-point Gauss-Legendre nodes and weights on [-1, 1].
void gauss_legendre_panel(std::vector<double>& nodes, std::vector<double>& weights);

}  // namespace otsphere::numerics
