#pragma once

// Branching mechanism constants, the truncated mechanism Phi^K, the
// fractional-moment identities and the existence-regime classifier.

#include <cstdint>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "siltlab/stable_kernels.hpp"

namespace siltlab {

constexpr double kInfiniteK = std::numeric_limits<double>::infinity();

/// (alpha, d, beta, K) with the derived constants eta, C_beta(K) and chi(m).
struct MechanismParams {
  double alpha = 2.0;
  int dim = 1;
  double beta = 0.5;
  double K = kInfiniteK;

  void validate() const;
  bool truncated() const { return K < kInfiniteK; }
  KernelParams kernel() const { return {alpha, dim}; }

  /// eta = beta (beta + 1) / Gamma(1 - beta).
  double eta() const;
  /// C_beta(K) = eta / (beta K^beta); 0 for K = infinity.
  double c_beta_K() const;
  /// chi(m) = eta K^{m-1-beta} / (m - 1 - beta); infinite for K = infinity.
  double chi(int m) const;
};

double mechanism_eta(double beta);

/// Phi^K(x) = eta int_0^K (e^{-ux} - 1 + ux) u^{-beta-2} du by quadrature.
double phi_K_integral(const MechanismParams& p, double x);

/// Phi^K(x) = sum_{m>=2} (-1)^m chi(m) x^m / m!, summed until a term drops below
/// tol relative to the partial sum. Extended precision is used once K x > 5.
double phi_K_series(const MechanismParams& p, double x, double tol = 1e-17);

/// Phi^K(x) through incomplete gamma functions; valid for any K x > 0.
double phi_K_closed(const MechanismParams& p, double x);

/// v^{1+beta}.
double full_mechanism(const MechanismParams& p, double v);

/// psi^K(v) = C_beta(K) v + Phi^K(v); equals v^{1+beta} for K = infinity.
double truncated_mechanism(const MechanismParams& p, double v);

struct FracResiduals {
  double first = 0.0;   ///< |eta_p int (1 - e^{-lz}) l^{-p} dl - z^{p-1}|
  double second = 0.0;  ///< |p eta_p int (e^{-lz} - 1 + lz) l^{-p-1} dl - z^p|
};

double frac_eta(double p);
FracResiduals frac_identity_residuals(double p, double z);

enum class Regime { SILT, RENORMALIZED_SILT, NONE };

struct RegimeVerdict {
  Regime regime = Regime::NONE;
  double upper_threshold = 0.0;  ///< d/2
  double lower_threshold = 0.0;  ///< d / (2 + (1+beta)^{-1})
};

RegimeVerdict existence_regime(double alpha, int dim, double beta);
std::string to_string(Regime r);

/// Offspring distribution whose particle generator reproduces psi^K exactly:
/// n c_n (f_n(1 - v/n) - (1 - v/n)) = psi^K(v).
class OffspringLaw {
 public:
  static OffspringLaw build(const MechanismParams& p, double n);

  double n() const { return n_; }
  /// Per-particle branching rate c_n.
  double branch_rate() const { return rate_; }
  std::size_t k_max() const { return probs_.size() - 1; }
  /// p_k for k <= k_max.
  const std::vector<double>& probabilities() const { return probs_; }
  double probability(std::size_t k) const { return k < probs_.size() ? probs_[k] : 0.0; }
  /// Mass of {L > k_max}; nonzero only when nK is unbounded.
  double tail_mass() const { return tail_; }
  /// Sum of k p_k including the tail.
  double mean() const { return mean_; }
  /// Generating function f_n(s) for s in [0, 1].
  double pgf(double s) const;
  /// P(L > k) from the table (k < k_max) or the tail representation.
  double survival(std::size_t k) const;

  std::uint64_t sample(Rng& rng) const;

 private:
  MechanismParams params_;
  double n_ = 1.0;
  double rate_ = 0.0;
  double tail_ = 0.0;
  double mean_ = 1.0;
  double scale_ = 0.0;  // eta n^beta / c_n
  std::vector<double> probs_;
  std::vector<double> cdf_;
};

}  // namespace siltlab
