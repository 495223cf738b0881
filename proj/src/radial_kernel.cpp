#include "siltlab/radial_kernel.hpp"

#include <algorithm>
#include <cmath>

#include "siltlab/errors.hpp"
#include "siltlab/quadrature.hpp"

namespace siltlab {

namespace {

double unit_value(const KernelTable& t, double r) {
  const auto& p = t.params();
  return has_closed_form(p) ? unit_density_closed_form(p, r) : t.unit(r);
}

}  // namespace

RadialKernel RadialKernel::density(std::shared_ptr<const KernelTable> table, double eps) {
  if (!(eps > 0.0)) throw DomainError("p_eps needs eps > 0");
  RadialKernel k;
  k.kind_ = Kind::Density;
  k.eps_ = eps;
  k.table_ = std::move(table);
  return k;
}

RadialKernel RadialKernel::green(std::shared_ptr<const KernelTable> table, double lambda, double eps,
                                 const RadialGrid& grid) {
  RadialKernel k;
  k.kind_ = Kind::Green;
  k.eps_ = eps;
  k.lambda_ = lambda;
  k.green_ = std::make_shared<GreenTable>(GreenTable::build(*table, lambda, eps, grid));
  k.table_ = std::move(table);
  return k;
}

bool RadialKernel::finite_at_origin() const {
  return kind_ == Kind::Density || green_->finite_at_origin();
}

double RadialKernel::at_origin() const {
  if (kind_ == Kind::Green) return green_->at_origin();
  return std::pow(eps_, -params().dim / params().alpha) * table_->at_origin();
}

double RadialKernel::operator()(double r) const {
  if (kind_ == Kind::Green) return (*green_)(r);
  const double scale = std::pow(eps_, -1.0 / params().alpha);
  return std::pow(scale, params().dim) * unit_value(*table_, std::abs(r) * scale);
}

double RadialKernel::fourier(double z) const {
  const double psi = fourier_exponent(params().alpha, z);
  if (kind_ == Kind::Density) return std::exp(-eps_ * psi);
  const double m = lambda_ + psi;
  if (m == 0.0) throw SingularEvaluation("G^{0,eps} has infinite mass");
  return std::exp(-eps_ * m) / m;
}

double RadialKernel::origin_profile(double tau) const {
  if (tau < 0.0) throw DomainError("origin profile needs tau >= 0");
  const double alpha = params().alpha;
  const int d = params().dim;
  const double p0 = table_->at_origin();
  if (kind_ == Kind::Density) return std::pow(tau + eps_, -d / alpha) * p0;
  const double a = tau + eps_;
  const double q = 1.0 - d / alpha;
  if (lambda_ == 0.0) {
    if (!(d > alpha)) throw DomainError("G^{0,eps} is not finite for d <= alpha");
    if (a == 0.0) throw SingularEvaluation("Green kernel is infinite at the origin");
    return p0 * std::pow(a, q) / (-q);
  }
  if (a == 0.0 && !(d < alpha)) throw SingularEvaluation("Green kernel is infinite at the origin");
  // e^{lambda tau} int_a^inf e^{-lambda v} v^{-d/alpha} dv in w = ln v
  auto f = [&](double w) { return std::exp(-lambda_ * (std::exp(w) - tau) + q * w); };
  const double hi = std::log(a + 45.0 / lambda_);
  const double lo = a > 0.0 ? std::log(a) : std::min(hi - 1.0, -45.0 / q);
  const int n = std::max(1, static_cast<int>(std::ceil(hi - lo)));
  const double h = (hi - lo) / n;
  double s = 0.0;
  for (int i = 0; i < n; ++i) s += quad::gauss_kronrod(f, lo + i * h, lo + (i + 1) * h, 1e-13, 12);
  return p0 * s;
}

double RadialKernel::length_scale() const {
  const double alpha = params().alpha;
  double l = INFINITY;
  if (eps_ > 0.0) l = std::min(l, std::pow(eps_, 1.0 / alpha));
  if (kind_ == Kind::Green && lambda_ > 0.0) l = std::min(l, std::pow(lambda_, -1.0 / alpha));
  return std::isfinite(l) ? l : 1.0;
}

KernelLookup::KernelLookup(const RadialKernel& k, double r_max, std::size_t points) : exact_(k) {
  if (!k.finite_at_origin()) throw SingularEvaluation("lookup tables need a kernel finite at the origin");
  if (points < 16) points = 16;
  const double s0 = std::pow(k.length_scale(), 2);
  inv_s0_ = 1.0 / s0;
  s_max_ = r_max * r_max;
  const double umax = std::log1p(s_max_ * inv_s0_);
  const double du = umax / static_cast<double>(points - 1);
  inv_du_ = 1.0 / du;
  values_.resize(points + 1);
  values_[0] = k.at_origin();
  for (std::size_t i = 1; i <= points; ++i) {
    const double r2 = s0 * std::expm1(du * static_cast<double>(i));
    values_[i] = k(std::sqrt(r2));
  }
}

double KernelLookup::tail(double r2) const { return exact_(std::sqrt(r2)); }

}  // namespace siltlab
