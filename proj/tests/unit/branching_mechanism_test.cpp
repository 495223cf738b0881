#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include <boost/math/quadrature/tanh_sinh.hpp>

#include "siltlab/branching_mechanism.hpp"
#include "siltlab/errors.hpp"

using namespace siltlab;

namespace {

MechanismParams mech(double beta, double K) {
  MechanismParams p;
  p.beta = beta;
  p.K = K;
  return p;
}

// eta int_0^K (e^{-ux} - 1 + ux) u^{-beta-2} du with its own quadrature
double phi_reference(double beta, double K, double x) {
  const double eta = beta * (beta + 1.0) / std::tgamma(1.0 - beta);
  boost::math::quadrature::tanh_sinh<double> ts;
  auto f = [&](double u) {
    if (u <= 0.0) return 0.0;
    const double y = u * x;
    if (y < 1e-3) return x * x * std::pow(u, -beta) * (0.5 - y / 6.0 + y * y / 24.0);
    return (std::expm1(-y) + y) * std::pow(u, -beta - 2.0);
  };
  return eta * ts.integrate(f, 0.0, K, 1e-15);
}

}  // namespace

TEST(MechanismConstants, EtaCAndChi) {
  const auto p = mech(0.5, 2.0);
  const double eta = 0.75 / std::sqrt(M_PI);
  EXPECT_NEAR(p.eta(), eta, 1e-15);
  EXPECT_NEAR(p.c_beta_K(), eta / (0.5 * std::sqrt(2.0)), 1e-15);
  EXPECT_NEAR(p.c_beta_K(), 0.5984, 1e-4);
  EXPECT_NEAR(p.chi(2), eta * std::sqrt(2.0) / 0.5, 1e-14);
  EXPECT_NEAR(p.chi(2), 1.1967, 2e-4);
  EXPECT_EQ(mech(0.5, kInfiniteK).c_beta_K(), 0.0);
  EXPECT_FALSE(std::isfinite(mech(0.5, kInfiniteK).chi(2)));
}

TEST(MechanismConstants, ValidateRejectsBadParams) {
  EXPECT_THROW(mech(1.0, 2.0).validate(), std::exception);
  EXPECT_THROW(mech(0.5, -1.0).validate(), std::exception);
  MechanismParams p = mech(0.5, 2.0);
  p.alpha = 2.5;
  EXPECT_THROW(p.validate(), std::exception);
}

TEST(PhiK, ZeroAtOrigin) {
  const auto p = mech(0.5, 2.0);
  EXPECT_EQ(phi_K_integral(p, 0.0), 0.0);
  EXPECT_EQ(phi_K_series(p, 0.0), 0.0);
}

TEST(PhiK, SeriesMatchesQuadratureOracle) {
  EXPECT_NEAR(phi_K_series(mech(0.5, 2.0), 1.0), phi_reference(0.5, 2.0, 1.0), 1e-10 * phi_reference(0.5, 2.0, 1.0));
  EXPECT_NEAR(phi_K_series(mech(0.3, 0.5), 4.0), phi_reference(0.3, 0.5, 4.0), 1e-10 * phi_reference(0.3, 0.5, 4.0));
  EXPECT_NEAR(phi_K_integral(mech(0.5, 2.0), 1.0), phi_reference(0.5, 2.0, 1.0), 1e-10 * phi_reference(0.5, 2.0, 1.0));
}

TEST(PhiK, SeriesIntegralDualityAndEnvelope) {
  for (double beta : {0.3, 0.5, 0.8})
    for (double K : {0.5, 2.0, 10.0}) {
      const auto p = mech(beta, K);
      for (double x = 0.0; x <= 10.0; x += 0.5) {
        const double s = phi_K_series(p, x), q = phi_K_integral(p, x);
        EXPECT_NEAR(s, q, 1e-10 * std::max(q, 1e-300)) << beta << ' ' << K << ' ' << x;
        EXPECT_LE(q, 0.5 * p.chi(2) * x * x * (1.0 + 1e-12));
        EXPECT_NEAR(phi_K_closed(p, x), q, 1e-10 * std::max(q, 1e-300));
      }
    }
}

TEST(PhiK, MonotoneTruncation) {
  for (double x : {0.3, 2.0, 7.0}) {
    double prev = 0.0;
    double prev_c = std::numeric_limits<double>::infinity();
    for (double K : {0.25, 0.5, 1.0, 2.0, 4.0, 8.0}) {
      const auto p = mech(0.5, K);
      EXPECT_GE(phi_K_integral(p, x), prev);
      EXPECT_LT(p.c_beta_K(), prev_c);
      prev = phi_K_integral(p, x);
      prev_c = p.c_beta_K();
    }
  }
}

TEST(PhiK, ConvexNonnegative) {
  const auto p = mech(0.5, 2.0);
  for (double x = 0.5; x < 10.0; x += 0.5) {
    const double a = phi_K_integral(p, x - 0.25), b = phi_K_integral(p, x), c = phi_K_integral(p, x + 0.25);
    EXPECT_GE(b, 0.0);
    EXPECT_GE(a + c - 2.0 * b, -1e-12);
  }
}

TEST(Mechanism, FullAndTruncatedLimit) {
  EXPECT_DOUBLE_EQ(full_mechanism(mech(0.5, kInfiniteK), 1.0), 1.0);
  EXPECT_DOUBLE_EQ(full_mechanism(mech(0.5, kInfiniteK), 4.0), 8.0);
  EXPECT_NEAR(truncated_mechanism(mech(0.5, 1e3), 1.0), 1.0, 1e-3);
  EXPECT_DOUBLE_EQ(truncated_mechanism(mech(0.5, kInfiniteK), 4.0), 8.0);
}

TEST(FractionalIdentities, Residuals) {
  for (double p : {1.5, 1.9})
    for (double z : {0.5, 1.0, 2.0}) {
      const auto r = frac_identity_residuals(p, z);
      EXPECT_LT(r.first, 1e-6) << p << ' ' << z;
      EXPECT_LT(r.second, 1e-6) << p << ' ' << z;
    }
  EXPECT_NEAR(frac_eta(1.5), 0.5 / std::tgamma(0.5), 1e-15);
}

TEST(Regime, Examples) {
  EXPECT_EQ(existence_regime(2.0, 3, 0.5).regime, Regime::SILT);
  EXPECT_EQ(existence_regime(1.8, 4, 0.9).regime, Regime::RENORMALIZED_SILT);
  EXPECT_EQ(existence_regime(1.8, 5, 0.9).regime, Regime::NONE);
  EXPECT_EQ(existence_regime(1.5, 3, 0.5).regime, Regime::RENORMALIZED_SILT);
  const auto v = existence_regime(1.5, 3, 0.5);
  EXPECT_DOUBLE_EQ(v.upper_threshold, 1.5);
  EXPECT_DOUBLE_EQ(v.lower_threshold, 3.0 / (2.0 + 1.0 / 1.5));
  EXPECT_EQ(to_string(Regime::RENORMALIZED_SILT), "RENORMALIZED_SILT");
}

TEST(Regime, BoundaryTies) {
  // alpha = d/2 falls in the renormalized part, alpha = lower threshold in neither
  EXPECT_EQ(existence_regime(1.0, 2, 0.5).regime, Regime::RENORMALIZED_SILT);
  EXPECT_EQ(existence_regime(2.0, 4, 0.5).regime, Regime::RENORMALIZED_SILT);
  EXPECT_EQ(existence_regime(0.75, 2, 0.5).regime, Regime::NONE);
}

TEST(Regime, MonotoneInAlpha) {
  auto rank = [](Regime r) { return r == Regime::SILT ? 2 : r == Regime::RENORMALIZED_SILT ? 1 : 0; };
  for (int d = 1; d <= 5; ++d)
    for (double beta : {0.1, 0.5, 0.9}) {
      int prev = 0;
      for (double a = 0.05; a <= 2.0; a += 0.05) {
        const int r = rank(existence_regime(a, d, beta).regime);
        EXPECT_GE(r, prev);
        prev = r;
      }
    }
}

TEST(OffspringLaw, ProbabilityAndSubcriticalMean) {
  for (double n : {10.0, 100.0, 2000.0}) {
    const auto p = mech(0.5, 2.0);
    const auto law = OffspringLaw::build(p, n);
    double total = 0.0, mean = 0.0;
    for (std::size_t k = 0; k <= law.k_max(); ++k) {
      EXPECT_GE(law.probability(k), 0.0);
      total += law.probability(k);
      mean += k * law.probability(k);
    }
    EXPECT_EQ(law.probability(1), 0.0);
    EXPECT_NEAR(total + law.tail_mass(), 1.0, 1e-10);
    EXPECT_NEAR(mean, 1.0 - p.c_beta_K() / law.branch_rate(), 1e-9);
    EXPECT_LT(law.mean(), 1.0);
  }
}

TEST(OffspringLaw, CriticalRate) {
  for (double n : {10.0, 100.0, 1e4}) {
    const auto law = OffspringLaw::build(mech(0.5, kInfiniteK), n);
    EXPECT_NEAR(law.branch_rate(), 1.5 * std::sqrt(n), 1e-9 * law.branch_rate());
    EXPECT_NEAR(law.mean(), 1.0, 1e-9);
  }
}

TEST(OffspringLaw, GeneratorIdentity) {
  for (double K : {0.5, 2.0, kInfiniteK})
    for (double n : {10.0, 100.0})
      for (double v : {0.1, 1.0, 5.0}) {
        const auto p = mech(0.5, K);
        const auto law = OffspringLaw::build(p, n);
        const double s = 1.0 - v / n;
        const double lhs = n * law.branch_rate() * (law.pgf(s) - s);
        EXPECT_NEAR(lhs, truncated_mechanism(p, v), 1e-9 * std::max(1.0, lhs)) << K << ' ' << n << ' ' << v;
      }
}

TEST(OffspringLaw, SampleFrequencies) {
  const auto law = OffspringLaw::build(mech(0.5, 2.0), 10.0);
  Rng rng(3);
  const int N = 200000;
  std::vector<int> count(4, 0);
  for (int i = 0; i < N; ++i) {
    const auto L = law.sample(rng);
    if (L < 4) ++count[L];
  }
  for (int k : {0, 2, 3}) {
    const double p = law.probability(k);
    EXPECT_NEAR(count[k] / double(N), p, 4.0 * std::sqrt(p * (1 - p) / N)) << k;
  }
  EXPECT_EQ(count[1], 0);
}
