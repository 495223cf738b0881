#include "siltlab/branching_mechanism.hpp"

#include <cmath>

#include <boost/math/special_functions/gamma.hpp>
#include <boost/multiprecision/cpp_bin_float.hpp>

#include "siltlab/errors.hpp"
#include "siltlab/quadrature.hpp"

namespace siltlab {

namespace {

// e^{-y} - 1 + y without cancellation.
double em1_plus(double y) {
  if (y < 0.1) {
    double term = y * y / 2.0, sum = 0.0;
    for (int k = 2; k < 14; ++k) {
      sum += term;
      term *= -y / (k + 1);
    }
    return sum;
  }
  return std::expm1(-y) + y;
}

// (e^{-y} - 1 + y) / y^2 and (1 - e^{-y}) / y, finite at y = 0.
double em1_ratio(double y) { return y < 1e-8 ? 0.5 - y / 6.0 : em1_plus(y) / (y * y); }
double one_minus_exp_ratio(double y) { return y < 1e-8 ? 1.0 - 0.5 * y : -std::expm1(-y) / y; }

// int_0^L v^{-1-beta} (1 - e^{-v}) dv
double rate_integral(double beta, double L) {
  if (std::isinf(L)) return std::tgamma(1.0 - beta) / beta;
  const double lower = boost::math::tgamma_lower(1.0 - beta, L);
  return (lower - std::pow(L, -beta) * (-std::expm1(-L))) / beta;
}

}  // namespace

void MechanismParams::validate() const {
  kernel().validate();
  if (!(beta > 0.0 && beta < 1.0)) throw DomainError("beta must lie in (0, 1)");
  if (!(K > 0.0)) throw DomainError("truncation level K must be positive");
}

double mechanism_eta(double beta) { return beta * (beta + 1.0) / std::tgamma(1.0 - beta); }

double MechanismParams::eta() const { return mechanism_eta(beta); }

double MechanismParams::c_beta_K() const {
  if (!truncated()) return 0.0;
  return eta() / (beta * std::pow(K, beta));
}

double MechanismParams::chi(int m) const {
  if (m < 2) throw DomainError("chi(m) is defined for m >= 2");
  if (!truncated()) return kInfiniteK;
  return eta() * std::pow(K, m - 1 - beta) / (m - 1 - beta);
}

double phi_K_integral(const MechanismParams& p, double x) {
  if (!p.truncated()) throw DomainError("Phi^K needs finite K; use full_mechanism for K = infinity");
  if (x < 0.0) throw DomainError("Phi^K is defined for x >= 0");
  if (x == 0.0) return 0.0;
  auto f = [&](double u) { return x * x * em1_ratio(u * x) * std::pow(u, -p.beta); };
  return p.eta() * quad::tanh_sinh(f, 0.0, p.K, 1e-14);
}

double phi_K_series(const MechanismParams& p, double x, double tol) {
  if (!p.truncated()) throw DomainError("Phi^K needs finite K; use full_mechanism for K = infinity");
  if (x < 0.0) throw DomainError("Phi^K is defined for x >= 0");
  if (x == 0.0) return 0.0;
  const double L = p.K * x;
  if (L > 190.0) throw NumericalError("Phi^K series loses all precision for K x > 190");
  const int cap = static_cast<int>(10.0 * L) + 200;
  // Phi^K(x) = eta K^{-1-beta} sum_m (-1)^m L^m / (m! (m - 1 - beta))
  auto run = [&](auto zero) {
    using R = decltype(zero);
    R sum = 0, power = R(L) * R(L) / 2;  // L^m / m!
    for (int m = 2; m < cap; ++m) {
      const R term = power / (R(m - 1) - R(p.beta));
      sum += (m % 2 == 0) ? term : R(-term);
      if (m > L && static_cast<double>(term) <= tol * std::abs(static_cast<double>(sum))) return static_cast<double>(sum);
      power *= R(L) / R(m + 1);
    }
    throw NumericalError("Phi^K series did not converge");
  };
  const double s = L > 5.0 ? run(boost::multiprecision::cpp_bin_float_100(0)) : run(0.0);
  return p.eta() * std::pow(p.K, -1.0 - p.beta) * s;
}

double phi_K_closed(const MechanismParams& p, double x) {
  if (x < 0.0) throw DomainError("Phi^K is defined for x >= 0");
  if (x == 0.0) return 0.0;
  if (!p.truncated()) return std::pow(x, 1.0 + p.beta);
  const double L = p.K * x;
  if (L < 1.0) return phi_K_integral(p, x);
  const double b = p.beta;
  const double inner = (rate_integral(b, L) - em1_plus(L) * std::pow(L, -1.0 - b)) / (1.0 + b);
  return p.eta() * std::pow(x, 1.0 + b) * inner;
}

double full_mechanism(const MechanismParams& p, double v) {
  if (v < 0.0) throw DomainError("mechanism argument must be >= 0");
  return std::pow(v, 1.0 + p.beta);
}

double truncated_mechanism(const MechanismParams& p, double v) {
  if (!p.truncated()) return full_mechanism(p, v);
  return p.c_beta_K() * v + phi_K_closed(p, v);
}

double frac_eta(double p) {
  if (!(p > 1.0 && p < 2.0)) throw DomainError("fractional identities need 1 < p < 2");
  return (p - 1.0) / std::tgamma(2.0 - p);
}

FracResiduals frac_identity_residuals(double p, double z) {
  const double ep = frac_eta(p);
  if (!(z > 0.0)) throw DomainError("fractional identities need z > 0");
  // split at l = 1/z; on (1/z, inf) substitute l = 1/(z xi)
  auto f1 = [&](double l) { return z * one_minus_exp_ratio(l * z) * std::pow(l, 1.0 - p); };
  auto f2 = [&](double l) { return z * z * em1_ratio(l * z) * std::pow(l, 1.0 - p); };
  auto folded = [&](auto f) {
    return [&, f](double xi) {
      if (!(xi > 1e-150)) return 0.0;
      const double l = 1.0 / (z * xi);
      return f(l) / (z * xi * xi);
    };
  };
  const double a = 1.0 / z;
  const double i1 = quad::tanh_sinh(f1, 0.0, a, 1e-13) + quad::tanh_sinh(folded(f1), 0.0, 1.0, 1e-13);
  const double i2 = quad::tanh_sinh(f2, 0.0, a, 1e-13) + quad::tanh_sinh(folded(f2), 0.0, 1.0, 1e-13);
  return {std::abs(ep * i1 - std::pow(z, p - 1.0)), std::abs(p * ep * i2 - std::pow(z, p))};
}

RegimeVerdict existence_regime(double alpha, int dim, double beta) {
  if (!(alpha > 0.0 && alpha <= 2.0)) throw DomainError("alpha must lie in (0, 2]");
  if (dim < 1) throw DomainError("dimension must be at least 1");
  if (!(beta > 0.0 && beta < 1.0)) throw DomainError("beta must lie in (0, 1)");
  RegimeVerdict v;
  v.upper_threshold = 0.5 * dim;
  v.lower_threshold = dim / (2.0 + 1.0 / (1.0 + beta));
  // d/2 < alpha  and  d/(2 + 1/(1+beta)) < alpha <=> d (1+beta) < alpha (3 + 2 beta)
  if (dim < 2.0 * alpha) {
    v.regime = Regime::SILT;
  } else if (dim * (1.0 + beta) < alpha * (3.0 + 2.0 * beta)) {
    v.regime = Regime::RENORMALIZED_SILT;
  } else {
    v.regime = Regime::NONE;
  }
  return v;
}

std::string to_string(Regime r) {
  switch (r) {
    case Regime::SILT: return "SILT";
    case Regime::RENORMALIZED_SILT: return "RENORMALIZED_SILT";
    case Regime::NONE: return "NONE";
  }
  return "NONE";
}

}  // namespace siltlab
