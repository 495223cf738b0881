#include <algorithm>
#include <cmath>
#include <numbers>

#include "siltlab/errors.hpp"
#include "siltlab/quadrature.hpp"
#include "siltlab/stable_kernels.hpp"

namespace siltlab {

double loglog_slope(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2) throw DomainError("slope fit needs two or more points");
  const double n = static_cast<double>(x.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double lx = std::log(x[i]), ly = std::log(y[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

double riesz_convolution(double a, double b, int dim, double s) {
  if (!(a > 0.0 && b > 0.0 && a + b < dim)) throw DomainError("Riesz convolution needs a, b > 0 and a + b < d");
  if (!(s > 0.0)) throw DomainError("separation must be positive");
  const double d = dim;
  if (dim == 1) {
    // |z|^{a-1} |z - s|^{b-1} on the line: (-inf,0), (0,s), (s,inf)
    auto mid = [&](double z) { return std::pow(z, a - 1) * std::pow(s - z, b - 1); };
    auto far = [&](double xi, bool right) {
      // z = s / xi (right) or z = -s / xi (left), xi in (0,1]
      const double z = s / xi;
      if (!(z < 1e100)) return 0.0;
      const double jac = s / (xi * xi);
      return right ? std::pow(z, a - 1) * std::pow(z - s, b - 1) * jac
                   : std::pow(z, a - 1) * std::pow(z + s, b - 1) * jac;
    };
    return quad::tanh_sinh(mid, 0.0, s, 1e-10) +
           quad::tanh_sinh([&](double xi) { return far(xi, true); }, 0.0, 1.0, 1e-10) +
           quad::tanh_sinh([&](double xi) { return far(xi, false); }, 0.0, 1.0, 1e-10);
  }
  // z = rho * omega, theta = angle(omega, e_1)
  const double shell = sphere_area(dim - 1);
  auto angular = [&](double rho) {
    auto f = [&](double th) {
      const double h = std::sin(0.5 * th);
      const double q = (rho - s) * (rho - s) + 4.0 * rho * s * h * h;
      if (q == 0.0) return 0.0;
      return std::pow(q, 0.5 * (b - d)) * std::pow(std::sin(th), dim - 2);
    };
    return quad::tanh_sinh(f, 0.0, std::numbers::pi, 1e-10);
  };
  auto inner = [&](double rho) { return std::pow(rho, a - 1) * angular(rho); };
  auto outer = [&](double xi) {
    const double rho = s / xi;
    if (!(rho < 1e100)) return 0.0;
    return inner(rho) * s / (xi * xi);
  };
  return shell * (quad::tanh_sinh(inner, 0.0, s, 1e-9) + quad::tanh_sinh(outer, 0.0, 1.0, 1e-9));
}

RieszFit riesz_exponent_check(double a, double b, int dim, std::span<const double> separations) {
  if (!(a > 0.0 && b > 0.0 && a + b < dim)) throw DomainError("Riesz exponent check needs a, b > 0 and a + b < d");
  if (separations.size() < 2) throw DomainError("need at least two separations");
  RieszFit fit;
  fit.separations.assign(separations.begin(), separations.end());
  for (double s : separations) fit.values.push_back(riesz_convolution(a, b, dim, s));
  fit.slope = loglog_slope(fit.separations, fit.values);
  return fit;
}

EnvelopeResult density_envelope_check(const KernelTable& kernel, double delta,
                                      std::span<const std::pair<double, double>> fit_points,
                                      std::span<const std::pair<double, double>> test_points) {
  const double alpha = kernel.alpha();
  const int d = kernel.dim();
  if (!(alpha < d)) throw DomainError("density envelope is only claimed for d > alpha");
  if (!(delta > 0.0 && delta < 1.0)) throw DomainError("delta must lie in (0, 1)");
  if (fit_points.empty() || test_points.empty()) throw DomainError("envelope check needs sample points");
  auto ratio = [&](const std::pair<double, double>& tx) {
    const auto [t, r] = tx;
    if (!(r > 0.0)) throw DomainError("envelope samples need |x| > 0");
    return kernel.density(t, r) / (std::pow(t, delta - 1.0) * std::pow(r, alpha - d - alpha * delta));
  };
  EnvelopeResult out;
  for (const auto& p : fit_points) out.fitted_c = std::max(out.fitted_c, ratio(p));
  for (const auto& p : test_points) out.test_max_ratio = std::max(out.test_max_ratio, ratio(p));
  out.pass = std::isfinite(out.test_max_ratio) && out.test_max_ratio <= 1.05 * out.fitted_c;
  return out;
}

}  // namespace siltlab
