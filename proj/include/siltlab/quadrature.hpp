#pragma once

// Thin wrappers over Boost.Math quadrature with the conventions used across
// the library: absolute+relative tolerance, functions of one double.

#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>

#include <cmath>
#include <limits>

namespace siltlab::quad {

/// Adaptive Gauss-Kronrod (31 points) on a finite interval.
template <class F>
double gauss_kronrod(F&& f, double a, double b, double rel_tol = 1e-13,
                     unsigned max_depth = 20) {
  if (a == b) return 0.0;
  return boost::math::quadrature::gauss_kronrod<double, 31>::integrate(
      f, a, b, max_depth, rel_tol);
}

/// Double-exponential rule on a finite interval; tolerates endpoint singularities.
template <class F>
double tanh_sinh(F&& f, double a, double b, double rel_tol = 1e-13) {
  if (a == b) return 0.0;
  static thread_local boost::math::quadrature::tanh_sinh<double> integrator(15);
  return integrator.integrate(f, a, b, rel_tol);
}

/// Double-exponential rule on [a, infinity).
template <class F>
double exp_sinh(F&& f, double a, double rel_tol = 1e-13) {
  static thread_local boost::math::quadrature::exp_sinh<double> integrator(12);
  return integrator.integrate(
      [&](double x) { return f(x); }, a, std::numeric_limits<double>::infinity(),
      rel_tol);
}

/// Composite Simpson weights for `intervals` (even) panels on [a, b].
inline double simpson_weight(std::size_t i, std::size_t intervals, double a, double b) {
  const double h = (b - a) / static_cast<double>(intervals);
  if (i == 0 || i == intervals) return h / 3.0;
  return (i % 2 == 1) ? 4.0 * h / 3.0 : 2.0 * h / 3.0;
}

}  // namespace siltlab::quad
