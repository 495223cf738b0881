#include <algorithm>
#include <cmath>
#include <numbers>

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/special_functions/bessel.hpp>

#include "siltlab/errors.hpp"
#include "siltlab/quadrature.hpp"
#include "siltlab/stable_kernels.hpp"

namespace siltlab {

namespace {

constexpr double kPi = std::numbers::pi;

double unit_exact(const KernelTable& kernel, double r) {
  const auto& p = kernel.params();
  return has_closed_form(p) ? unit_density_closed_form(p, r) : kernel.unit(r);
}

// int over [w_lo, w_hi] in chunks so the adaptive rule sees one bump at a time.
template <class F>
double chunked(F&& f, double lo, double hi, double width) {
  if (hi <= lo) return 0.0;
  const int n = std::max(1, static_cast<int>(std::ceil((hi - lo) / width)));
  const double h = (hi - lo) / n;
  double s = 0.0;
  for (int i = 0; i < n; ++i) s += quad::gauss_kronrod(f, lo + i * h, lo + (i + 1) * h, 1e-13, 12);
  return s;
}

// int_eps^inf e^{-lambda t} t^{-d/alpha} dt (finite cases only).
double time_weight_integral(double alpha, int d, double lambda, double eps) {
  const double q = 1.0 - d / alpha;
  if (lambda == 0.0) return std::pow(eps, q) / (-q);
  auto f = [&](double w) { return std::exp(-lambda * std::exp(w) + q * w); };
  const double hi = std::log(eps + 45.0 / lambda);
  double lo;
  if (eps > 0.0) {
    lo = std::log(eps);
  } else {
    lo = std::min(hi - 1.0, -45.0 / q);
  }
  return chunked(f, lo, hi, 1.0);
}

}  // namespace

double green_constant(double alpha, int dim) {
  if (!(dim > alpha)) throw DomainError("Green closed form requires d > alpha");
  return std::tgamma(0.5 * (dim - alpha)) /
         (std::pow(2.0, 0.5 * alpha) * std::pow(kPi, 0.5 * dim) * std::tgamma(0.5 * alpha));
}

double riesz_green_constant(double alpha, int dim) {
  const double c = green_constant(alpha, dim);
  return alpha == 2.0 ? c : c * std::pow(2.0, -0.5 * alpha);
}

double green_quadrature(const KernelTable& kernel, double lambda, double eps, double r) {
  const double alpha = kernel.alpha();
  const int d = kernel.dim();
  if (lambda < 0.0 || eps < 0.0) throw DomainError("Green kernel needs lambda >= 0 and eps >= 0");
  if (lambda == 0.0 && !(d > alpha)) throw DomainError("G^{0,eps} is not finite for d <= alpha");
  r = std::abs(r);
  if (r == 0.0) {
    if (!(eps > 0.0 || (lambda > 0.0 && d < alpha))) throw SingularEvaluation("Green kernel is infinite at the origin");
    return kernel.at_origin() * time_weight_integral(alpha, d, lambda, eps);
  }
  const double q = 1.0 - d / alpha;
  auto f = [&](double w) {
    const double t = std::exp(w);
    return std::exp(-lambda * t + q * w) * unit_exact(kernel, r * std::exp(-w / alpha));
  };
  const double centre = alpha * std::log(r);
  const double lo = eps > 0.0 ? std::max(std::log(eps), centre - 24.0) : centre - 24.0;
  double hi;
  double tail = 0.0;
  if (lambda > 0.0) {
    hi = std::log(eps + 45.0 / lambda);
    hi = std::max(hi, lo);
  } else {
    const double t_hi = std::max(std::pow(1e6 * r, alpha), 10.0 * eps);
    hi = std::log(t_hi);
    tail = kernel.at_origin() * std::pow(t_hi, q) / (-q);
  }
  return chunked(f, lo, hi, 1.0) + tail;
}

GreenTable GreenTable::build(const KernelTable& kernel, double lambda, double eps, const RadialGrid& grid) {
  const double alpha = kernel.alpha();
  const int d = kernel.dim();
  if (lambda < 0.0 || eps < 0.0) throw DomainError("Green kernel needs lambda >= 0 and eps >= 0");
  if (lambda == 0.0 && !(d > alpha)) throw DomainError("G^{0,eps} is not finite for d <= alpha");
  GreenTable g;
  g.params_ = kernel.params();
  g.lambda_ = lambda;
  g.eps_ = eps;
  g.closed_form_ = lambda == 0.0 && eps == 0.0 && d > alpha;
  g.origin_finite_ = eps > 0.0 || (lambda > 0.0 && d < alpha);
  if (g.origin_finite_) g.origin_ = green_quadrature(kernel, lambda, eps, 0.0);
  auto radii = grid.radii();
  std::vector<double> values(radii.size());
  if (g.closed_form_) {
    g.riesz_c_ = riesz_green_constant(alpha, d);
    for (std::size_t i = 0; i < radii.size(); ++i) values[i] = g.riesz_c_ * std::pow(radii[i], alpha - d);
  } else {
    for (std::size_t i = 0; i < radii.size(); ++i)
      values[i] = std::max(green_quadrature(kernel, lambda, eps, radii[i]), 1e-300);
  }
  g.interp_ = LogLogInterpolant(std::move(radii), std::move(values));
  return g;
}

double GreenTable::at_origin() const {
  if (!origin_finite_) throw SingularEvaluation("Green kernel is infinite at the origin");
  return origin_;
}

double GreenTable::operator()(double r) const {
  r = std::abs(r);
  if (closed_form_) {
    if (r == 0.0) throw SingularEvaluation("Green kernel is infinite at the origin");
    return riesz_c_ * std::pow(r, params_.alpha - params_.dim);
  }
  const double r0 = interp_.radii().front();
  if (r < r0) {
    if (!origin_finite_) {
      if (r == 0.0) throw SingularEvaluation("Green kernel is infinite at the origin");
      return interp_(r);
    }
    const double q = eps_ > 0.0 ? 2.0 : params_.alpha - params_.dim;
    return origin_ + (interp_.values().front() - origin_) * std::pow(r / r0, q);
  }
  return interp_(r);
}

double green_value(const GreenTable& g, std::span<const double> x) {
  if (static_cast<int>(x.size()) != g.params().dim) throw DomainError("point dimension does not match table");
  double s = 0.0;
  for (double v : x) s += v * v;
  return g(std::sqrt(s));
}

double radial_fourier_transform(const GreenTable& g, double z) {
  const int d = g.params().dim;
  const double nu = 0.5 * d - 1.0;
  z = std::abs(z);
  // radial weight w(r) with G^(z) = int_0^inf G(r) w(r) dr
  auto weight = [&](double r) {
    if (z == 0.0) return sphere_area(d) * std::pow(r, d - 1);
    if (d == 1) return 2.0 * std::cos(z * r);
    if (d == 3) return 4.0 * kPi / z * r * std::sin(z * r);
    return std::pow(2.0 * kPi, 0.5 * d) * std::pow(z, -nu) * std::pow(r, 0.5 * d) *
           boost::math::cyl_bessel_j(nu, z * r);
  };
  auto f = [&](double r) { return g(r) * weight(r); };
  const auto radii = g.radii();
  double sum = quad::tanh_sinh(f, 0.0, radii.front(), 1e-12);
  using Rule = boost::math::quadrature::gauss<double, 20>;
  for (std::size_t i = 0; i + 1 < radii.size(); ++i) {
    const double a = radii[i], b = radii[i + 1];
    if (g(a) * std::pow(a, d) < 1e-30) break;
    int m = 1;
    if (z > 0.0) m = std::max(1, static_cast<int>(std::ceil(z * (b - a) / (0.5 * kPi))));
    const double h = (b - a) / m;
    for (int j = 0; j < m; ++j) sum += Rule::integrate(f, a + j * h, a + (j + 1) * h);
  }
  if (z == 0.0) {
    const double rb = radii.back();
    const double s = std::log(g(rb) / g(radii[radii.size() - 2])) / std::log(rb / radii[radii.size() - 2]);
    if (s < -d) sum += sphere_area(d) * g(rb) * std::pow(rb, d) / (-s - d);
  }
  return sum;
}

double fourier_resolvent_residual(const KernelTable& kernel, double lambda, double eps,
                                  std::span<const double> zgrid, const RadialGrid& grid) {
  if (!(lambda > 0.0)) throw DomainError("resolvent residual needs lambda > 0");
  const auto g = GreenTable::build(kernel, lambda, eps, grid);
  double worst = 0.0;
  for (double z : zgrid) {
    const double m = lambda + fourier_exponent(kernel.alpha(), z);
    worst = std::max(worst, std::abs(m * radial_fourier_transform(g, z) - std::exp(-eps * m)));
  }
  return worst;
}

}  // namespace siltlab
