#include <algorithm>
#include <cmath>

#include <boost/math/special_functions/gamma.hpp>

#include "siltlab/branching_mechanism.hpp"
#include "siltlab/errors.hpp"

namespace siltlab {

namespace {

double rate_integral(double beta, double L) {
  if (std::isinf(L)) return std::tgamma(1.0 - beta) / beta;
  const double lower = boost::math::tgamma_lower(1.0 - beta, L);
  return (lower - std::pow(L, -beta) * (-std::expm1(-L))) / beta;
}

// sum_{j > k} Gamma(j-1-beta) / j!  and  sum_{j > k} j Gamma(j-1-beta) / j!
double tail_sum(double beta, double k) {
  return std::exp(std::lgamma(k - beta) - std::lgamma(k + 1.0)) / (1.0 + beta);
}
double tail_first_moment(double beta, double k) {
  return std::exp(std::lgamma(k - beta) - std::lgamma(k)) / beta;
}

}  // namespace

OffspringLaw OffspringLaw::build(const MechanismParams& p, double n) {
  p.validate();
  if (!(n >= 1.0)) throw DomainError("particles per unit mass must be >= 1");
  OffspringLaw law;
  law.params_ = p;
  law.n_ = n;
  const double b = p.beta;
  const double nK = n * p.K;
  law.rate_ = p.c_beta_K() + p.eta() * std::pow(n, b) * rate_integral(b, nK);
  law.scale_ = p.eta() * std::pow(n, b) / law.rate_;

  const std::size_t kmax = p.truncated() ? std::max<std::size_t>(1000, static_cast<std::size_t>(std::ceil(10.0 * nK)))
                                         : 1000;
  law.probs_.assign(kmax + 1, 0.0);
  law.probs_[0] = truncated_mechanism(p, n) / (n * law.rate_);
  for (std::size_t k = 2; k <= kmax; ++k) {
    const double a = static_cast<double>(k) - 1.0 - b;
    const double reg = p.truncated() ? boost::math::gamma_p(a, nK) : 1.0;
    law.probs_[k] = law.scale_ * std::exp(std::lgamma(a) - std::lgamma(k + 1.0)) * reg;
  }
  double total = 0.0, mean = 0.0;
  for (std::size_t k = 0; k <= kmax; ++k) {
    if (law.probs_[k] < 0.0 || !std::isfinite(law.probs_[k])) throw NumericalError("offspring law produced an invalid probability");
    total += law.probs_[k];
    mean += static_cast<double>(k) * law.probs_[k];
  }
  if (!p.truncated()) {
    law.tail_ = law.scale_ * tail_sum(b, static_cast<double>(kmax));
    mean += law.scale_ * tail_first_moment(b, static_cast<double>(kmax));
  }
  if (std::abs(total + law.tail_ - 1.0) > 1e-10) throw NumericalError("offspring law does not sum to one");
  law.mean_ = mean;
  law.cdf_.resize(kmax + 1);
  double c = 0.0;
  for (std::size_t k = 0; k <= kmax; ++k) law.cdf_[k] = (c += law.probs_[k]);
  return law;
}

double OffspringLaw::pgf(double s) const {
  if (!(s >= 0.0 && s <= 1.0)) throw DomainError("pgf argument must lie in [0, 1]");
  if (!params_.truncated()) {
    // f(s) = s + (1-s)^{1+beta} / (1+beta)
    return s + truncated_mechanism(params_, n_ * (1.0 - s)) / (n_ * rate_);
  }
  double sum = 0.0, power = 1.0;
  for (double pk : probs_) {
    sum += pk * power;
    power *= s;
  }
  return sum;
}

double OffspringLaw::survival(std::size_t k) const {
  if (k >= k_max()) {
    if (params_.truncated()) return 0.0;
    return scale_ * tail_sum(params_.beta, static_cast<double>(k));
  }
  return std::max(0.0, 1.0 - cdf_[k]);
}

std::uint64_t OffspringLaw::sample(Rng& rng) const {
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  const double u = unif(rng);
  if (u < cdf_.back() || tail_ <= 0.0) {
    const auto it = std::upper_bound(cdf_.begin(), cdf_.end(), u);
    return static_cast<std::uint64_t>(std::min<std::ptrdiff_t>(it - cdf_.begin(), cdf_.size() - 1));
  }
  // L > k_max: mixing variable w with density proportional to w^{-2-beta} on
  // [k_max/2, nK), then L ~ Poisson(w) conditioned on L > k_max.
  const double w0 = 0.5 * static_cast<double>(k_max());
  const double b1 = 1.0 + params_.beta;
  const double wmax = n_ * params_.K;
  const double cut = std::isinf(wmax) ? 0.0 : std::pow(wmax / w0, -b1);
  for (;;) {
    const double v = cut + (1.0 - cut) * (1.0 - unif(rng));
    const double w = w0 * std::pow(v, -1.0 / b1);
    std::uint64_t L;
    if (w > 1e15) {
      std::normal_distribution<double> g(w, std::sqrt(w));
      L = static_cast<std::uint64_t>(std::max(0.0, std::round(g(rng))));
    } else {
      std::poisson_distribution<std::int64_t> pois(w);
      L = static_cast<std::uint64_t>(pois(rng));
    }
    if (L > k_max()) return L;
  }
}

}  // namespace siltlab
