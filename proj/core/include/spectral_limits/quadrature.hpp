#pragma once

#include <algorithm>
#include <cmath>

#include <boost/math/quadrature/gauss_kronrod.hpp>

namespace spectral_limits {

inline constexpr double kQuadratureTolerance = 1e-10;

namespace detail {

template <class F>
double gk15(const F& f, double a, double b, double* err) {
  return boost::math::quadrature::gauss_kronrod<double, 15>::integrate(f, a, b, 0, 0.0, err);
}

// Accepts a panel when its error estimate meets the budget or when the two halves
// agree with the whole; the latter ends refinement once the estimate hits its floor.
template <class F>
double adaptive_gk15(const F& f, double a, double b, double whole, double err, double abs_tol, int depth) {
  if (depth == 0 || err <= abs_tol || !std::isfinite(err)) return whole;
  const double mid = 0.5 * (a + b);
  double err_l = 0.0;
  double err_r = 0.0;
  const double left = gk15(f, a, mid, &err_l);
  const double right = gk15(f, mid, b, &err_r);
  if (std::abs(left + right - whole) <= abs_tol) return left + right;
  return adaptive_gk15(f, a, mid, left, err_l, 0.5 * abs_tol, depth - 1) +
         adaptive_gk15(f, mid, b, right, err_r, 0.5 * abs_tol, depth - 1);
}

}  // namespace detail

/// Adaptive 15-point Gauss-Kronrod on [a, b]. A panel is accepted when its error estimate
/// is below max(tolerance * max(|coarse|, coarse L1), abs_floor). Integrands with a kink
/// should be split at the kink by the caller.
template <class F>
double integrate(const F& f, double a, double b, double tolerance = kQuadratureTolerance,
                 double abs_floor = 0.0) {
  if (a == b) return 0.0;
  double err = 0.0;
  double l1 = 0.0;
  const double coarse =
      boost::math::quadrature::gauss_kronrod<double, 15>::integrate(f, a, b, 0, 0.0, &err, &l1);
  const double abs_tol = std::max(tolerance * std::max({std::abs(coarse), std::abs(l1), 1e-300}), abs_floor);
  return detail::adaptive_gk15(f, a, b, coarse, err, abs_tol, 30);
}

}  // namespace spectral_limits
