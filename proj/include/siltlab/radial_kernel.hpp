#pragma once

// Regularized radial kernels used as pair functions: p_eps and G^{lambda,eps}.

#include <memory>
#include <vector>

#include "siltlab/stable_kernels.hpp"

namespace siltlab {

class RadialKernel {
 public:
  enum class Kind { Density, Green };

  /// p_eps(r) built on `table` (alpha = 2 and alpha = 1 use the closed forms).
  static RadialKernel density(std::shared_ptr<const KernelTable> table, double eps);
  /// G^{lambda,eps}(r); tabulated once on construction.
  static RadialKernel green(std::shared_ptr<const KernelTable> table, double lambda, double eps,
                            const RadialGrid& grid = {});

  Kind kind() const { return kind_; }
  double eps() const { return eps_; }
  double lambda() const { return lambda_; }
  const KernelParams& params() const { return table_->params(); }
  const KernelTable& table() const { return *table_; }

  bool finite_at_origin() const;
  double at_origin() const;
  double operator()(double r) const;

  /// Fourier transform at |z|: e^{-eps psi} or e^{-eps(lambda+psi)}/(lambda+psi).
  double fourier(double z) const;

  /// (p_tau * kernel)(0) for tau >= 0.
  double origin_profile(double tau) const;

  /// Length below which the kernel varies: min(eps^{1/alpha}, lambda^{-1/alpha}).
  double length_scale() const;

 private:
  Kind kind_ = Kind::Density;
  double eps_ = 0.0;
  double lambda_ = 0.0;
  std::shared_ptr<const KernelTable> table_;
  std::shared_ptr<const GreenTable> green_;
};

/// Fast lookup of a finite radial kernel as a function of r^2, piecewise
/// linear on a grid uniform in log(1 + r^2 / s0).
class KernelLookup {
 public:
  KernelLookup() = default;
  KernelLookup(const RadialKernel& k, double r_max, std::size_t points = 8192);

  double operator()(double r2) const {
    if (r2 >= s_max_) return tail(r2);
    const double u = std::log1p(r2 * inv_s0_) * inv_du_;
    const auto i = static_cast<std::size_t>(u);
    const double f = u - static_cast<double>(i);
    return values_[i] + f * (values_[i + 1] - values_[i]);
  }
  double s_max() const { return s_max_; }

 private:
  double tail(double r2) const;

  RadialKernel exact_;
  double inv_s0_ = 1.0;
  double inv_du_ = 1.0;
  double s_max_ = 0.0;
  std::vector<double> values_;
};

}  // namespace siltlab
