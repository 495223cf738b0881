#include "siltlab/semigroup_oracle.hpp"

#include <cmath>
#include <iostream>

#include "siltlab/errors.hpp"
#include "siltlab/quadrature.hpp"

namespace siltlab {

namespace {

void require_truncated(const MechanismParams& p) {
  if (!p.truncated()) throw DomainError("second moment infinite for untruncated beta < 1 process");
}

void require_even(int intervals) {
  if (intervals < 2 || intervals % 2 != 0) throw ConfigurationError("Simpson rule needs an even number of intervals");
}

GridFunction evolve_raw(GridFunction g, double t, double damp, double alpha) {
  auto& v = g.values();
  apply_radial_multiplier(v, g.dim(), g.points_per_axis(), g.h(),
                          [&](double k) { return std::exp(-t * fourier_exponent(alpha, k)); });
  if (damp != 1.0) g *= damp;
  return g;
}

}  // namespace

double required_margin(double alpha, double t) { return 4.0 * std::pow(std::max(t, 0.0), 1.0 / alpha); }

GridFunction apply_semigroup(const GridFunction& f, double t, bool truncated, const MechanismParams& p) {
  if (t < 0.0) throw DomainError("semigroup time must be >= 0");
  const double damp = truncated ? std::exp(-p.c_beta_K() * t) : 1.0;
  if (t == 0.0) {
    GridFunction out = f;
    return out *= damp;
  }
  const double need = required_margin(p.alpha, t);
  if (f.spec().margin + 1e-12 < need) {
    std::clog << "siltlab: grid margin " << f.spec().margin << " is below 4 t^(1/alpha) = " << need
              << "; widening the grid for this evolution\n";
    return evolve_raw(f.widened(need), t, damp, p.alpha).cropped(f.spec());
  }
  return evolve_raw(f, t, damp, p.alpha);
}

double first_moment(const GridFunction& h, const GridFunction& phi, double t, const MechanismParams& p) {
  return h.inner(apply_semigroup(phi, t, true, p));
}

double second_moment(const GridFunction& h, const GridFunction& phi, double t, const MechanismParams& p,
                     int intervals) {
  require_truncated(p);
  require_even(intervals);
  if (t < 0.0) throw DomainError("time must be >= 0");
  const double m1 = first_moment(h, phi, t, p);
  if (t == 0.0) return m1 * m1;
  double integral = 0.0;
  for (int i = 0; i <= intervals; ++i) {
    const double s = t * i / intervals;
    GridFunction g = apply_semigroup(phi, s, true, p);
    g *= g;
    integral += quad::simpson_weight(i, intervals, 0.0, t) * h.inner(apply_semigroup(g, t - s, true, p));
  }
  return m1 * m1 + p.chi(2) * integral;
}

double cross_moment(const GridFunction& h, const GridFunction& phi, const GridFunction& psi, double t, double s,
                    const MechanismParams& p, int intervals) {
  require_truncated(p);
  require_even(intervals);
  if (t < s) throw DomainError("cross moment needs t >= s");
  if (s < 0.0) throw DomainError("time must be >= 0");
  const double base = first_moment(h, phi, t, p) * first_moment(h, psi, s, p);
  if (s == 0.0) return base;
  double integral = 0.0;
  for (int i = 0; i <= intervals; ++i) {
    const double r = s * i / intervals;
    GridFunction g = apply_semigroup(phi, t - r, true, p);
    g *= apply_semigroup(psi, s - r, true, p);
    integral += quad::simpson_weight(i, intervals, 0.0, s) * h.inner(apply_semigroup(g, r, true, p));
  }
  return base + p.chi(2) * integral;
}

KernelMoment kernel_cross_moment(const GridFunction& h, const RadialKernel& k, double t, double s,
                                 const MechanismParams& p) {
  if (t < s) throw DomainError("kernel cross moment needs t >= s");
  if (s < 0.0) throw DomainError("time must be >= 0");
  if (k.kind() == RadialKernel::Kind::Green && !(k.lambda() > 0.0))
    throw DomainError("G^{0,eps} is not integrable; the kernel cross moment needs lambda > 0");
  if (k.params().alpha != p.alpha || k.params().dim != p.dim || h.dim() != p.dim)
    throw ConfigurationError("kernel, grid and mechanism disagree on (alpha, d)");
  const double C = p.c_beta_K();
  KernelMoment out;

  double horizon = t + s + k.eps();
  if (k.kind() == RadialKernel::Kind::Green) horizon += 10.0 / k.lambda();
  const double need = required_margin(p.alpha, horizon);
  GridFunction g = h;
  if (h.spec().margin + 1e-12 < need) {
    std::clog << "siltlab: grid margin " << h.spec().margin << " is below " << need
              << " for the kernel pairing; widening the grid\n";
    g = h.widened(need);
  }
  const std::size_t n = g.points_per_axis();
  const auto coeffs = fft_forward(g.values(), g.dim(), n);
  const auto kk = half_spectrum_wavenumbers(g.dim(), n, g.h());
  const auto w = half_spectrum_weights(g.dim(), n);
  double sum = 0.0;
  for (std::size_t i = 0; i < coeffs.size(); ++i) {
    const double m = k.fourier(kk[i]) * std::exp(-(t + s) * fourier_exponent(p.alpha, kk[i]));
    sum += w[i] * std::norm(coeffs[i]) * m;
  }
  const double cell = std::pow(g.h(), g.dim());
  out.independent = std::exp(-C * (t + s)) * sum * cell / static_cast<double>(g.values().size());

  if (s == 0.0) return out;
  if (!p.truncated()) {
    out.common_ancestor = kInfiniteK;
    return out;
  }
  const double mass = h.integral();
  auto f = [&](double r) { return std::exp(-C * (t + s - r)) * k.origin_profile(t + s - 2.0 * r); };
  out.common_ancestor = p.chi(2) * mass * quad::gauss_kronrod(f, 0.0, s, 1e-12, 15);
  return out;
}

}  // namespace siltlab
