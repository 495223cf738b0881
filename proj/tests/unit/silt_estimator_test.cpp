#include <gtest/gtest.h>

#include <cmath>
#include <memory>
#include <numbers>
#include <tuple>

#include "siltlab/errors.hpp"
#include "siltlab/silt_estimator.hpp"

using namespace siltlab;
using std::numbers::pi;

namespace {

MechanismParams mech(double alpha, int dim, double beta, double K) {
  MechanismParams p;
  p.alpha = alpha;
  p.dim = dim;
  p.beta = beta;
  p.K = K;
  return p;
}

std::shared_ptr<const KernelTable> table(double alpha, int dim) {
  return std::make_shared<KernelTable>(KernelTable::build({alpha, dim}));
}

ParticleCloud cloud(int dim, double n, const std::vector<std::vector<double>>& atoms) {
  ParticleCloud c(dim, n);
  for (const auto& a : atoms) c.push(a);
  return c;
}

// Atoms that neither move nor branch, observed on the grid 0, dt, ..., T.
PathRecord frozen_path(const ParticleCloud& atoms, double T, double dt) {
  RunConfig c;
  c.params = mech(2.0, atoms.dim(), 0.5, 2.0);
  c.n = atoms.particles_per_mass();
  c.T = T;
  c.dt = dt;
  c.freeze_motion = true;
  c.freeze_branching = true;
  Rng rng(0);
  return simulate_path(c, OffspringLaw::build(c.params, c.n), atoms, rng);
}

PathRecord random_path(const MechanismParams& p, double n, double T, double dt, std::uint64_t seed) {
  RunConfig c;
  c.params = p;
  c.n = n;
  c.T = T;
  c.dt = dt;
  Rng rng(seed);
  return simulate_path(c, OffspringLaw::build(p, n), InitialDensity::gaussian(p.dim, 0.5), rng);
}

double gauss0(double eps) { return 1.0 / std::sqrt(2.0 * pi * eps); }
// G^{lambda,eps}(0) for psi = z^2/2 in d = 1
double gauss_green0(double lambda, double eps) { return std::erfc(std::sqrt(lambda * eps)) / std::sqrt(2.0 * lambda); }

}  // namespace

TEST(PairSum, SingleAtomDensity) {
  const auto t = table(1.5, 1);
  const auto k = RadialKernel::density(t, 0.3);
  const auto A = cloud(1, 1.0, {{0.0}});
  const auto s = pairwise_kernel_sum(A, A, k, SelfPairPolicy::Include);
  EXPECT_NEAR(s.value, std::pow(0.3, -1.0 / 1.5) * t->unit(0.0), 1e-12);
  EXPECT_FALSE(s.binned);
}

TEST(PairSum, TwoAtomsRieszKernel) {
  const auto t = table(1.0, 3);
  const auto g = RadialKernel::green(t, 0.0, 0.0);
  const double r = 0.7;
  const auto A = cloud(3, 2.0, {{0.0, 0.0, 0.0}, {r, 0.0, 0.0}});
  // Fourier multiplier |z|^{-1} in d = 3: 1 / (2 pi^2 |x|^2)
  const double c = 1.0 / (2.0 * pi * pi);
  EXPECT_NEAR(pairwise_kernel_sum(A, A, g, SelfPairPolicy::Exclude).value, 2.0 * 0.25 * c / (r * r), 1e-12);
  EXPECT_THROW(pairwise_kernel_sum(A, A, g, SelfPairPolicy::Include), SingularEvaluation);
  const auto B = A;
  EXPECT_THROW(pairwise_kernel_sum(A, B, g, SelfPairPolicy::Exclude), SingularEvaluation);
}

TEST(PairSum, ExcludeDropsOnlySelfPairs) {
  const auto t = table(2.0, 1);
  const auto k = RadialKernel::density(t, 0.5);
  const auto A = cloud(1, 2.0, {{0.0}, {1.0}});
  const double inc = pairwise_kernel_sum(A, A, k, SelfPairPolicy::Include).value;
  const double exc = pairwise_kernel_sum(A, A, k, SelfPairPolicy::Exclude).value;
  EXPECT_NEAR(inc - exc, 2.0 * 0.25 * gauss0(0.5), 1e-14);
  EXPECT_NEAR(exc, 2.0 * 0.25 * gauss0(0.5) * std::exp(-1.0), 1e-10 * exc);
}

TEST(PairSum, BinnedMatchesExact) {
  for (const auto& [alpha, dim, eps] : {std::tuple{1.5, 1, 0.1}, std::tuple{2.0, 2, 0.05}}) {
    const auto t = table(alpha, dim);
    Rng rng(17);
    const auto A = init_cloud(InitialDensity::gaussian(dim, 0.5), 1000, rng);
    const auto B = init_cloud(InitialDensity::gaussian(dim, 0.7), 1000, rng);
    for (const auto& k : {RadialKernel::density(t, eps), RadialKernel::green(t, 1.0, eps)}) {
      PairSumOptions exact, binned;
      exact.backend = PairBackend::Exact;
      binned.backend = PairBackend::Binned;
      const auto e = pairwise_kernel_sum(A, B, k, SelfPairPolicy::Include, exact);
      const auto b = pairwise_kernel_sum(A, B, k, SelfPairPolicy::Include, binned);
      EXPECT_TRUE(b.binned);
      EXPECT_LT(std::abs(b.value - e.value) / e.value, 1e-3) << alpha << ' ' << dim;
      EXPECT_LE(std::abs(b.value - e.value), b.error_bound) << alpha << ' ' << dim;
      const auto self = pairwise_kernel_sum(A, A, k, SelfPairPolicy::Exclude, binned);
      const auto self_exact = pairwise_kernel_sum(A, A, k, SelfPairPolicy::Exclude, exact);
      EXPECT_LT(std::abs(self.value - self_exact.value) / self_exact.value, 1e-3);
    }
  }
}

TEST(PairSum, BinnedRefusesHeavyTailInTwoDimensions) {
  const auto t = table(1.5, 2);
  Rng rng(18);
  const auto A = init_cloud(InitialDensity::gaussian(2, 0.5), 200, rng);
  PairSumOptions binned;
  binned.backend = PairBackend::Binned;
  EXPECT_THROW(pairwise_kernel_sum(A, A, RadialKernel::density(t, 0.1), SelfPairPolicy::Include, binned),
               ConfigurationError);
  PairSumOptions automatic;
  automatic.exact_pair_limit = 0.0;
  EXPECT_FALSE(pairwise_kernel_sum(A, A, RadialKernel::density(t, 0.1), SelfPairPolicy::Include, automatic).binned);
}

TEST(ApproxSilt, FrozenSingleAtom) {
  SiltContext ctx(table(2.0, 1));
  const auto p = frozen_path(cloud(1, 1.0, {{0.0}}), 1.0, 1.0 / 16.0);
  for (double eps : {0.4, 0.1})
    EXPECT_NEAR(approx_silt(p, ctx, eps, 1.0), 0.5 * gauss0(eps), 1e-12);
  double prev = 0.0;
  for (double eps : {0.8, 0.4, 0.2, 0.1, 0.05}) {
    const double g = approx_silt(p, ctx, eps, 1.0);
    EXPECT_GT(g, prev);
    prev = g;
  }
}

TEST(ApproxSilt, FrozenTwoAtoms) {
  SiltContext ctx(table(2.0, 1));
  const auto p = frozen_path(cloud(1, 2.0, {{0.0}, {1.0}}), 1.0, 1.0 / 8.0);
  const double eps = 0.25;
  const double pair = 0.25 * (2.0 * gauss0(eps) + 2.0 * gauss0(eps) * std::exp(-0.5 / eps));
  EXPECT_NEAR(approx_silt(p, ctx, eps, 1.0), 0.5 * pair, 1e-8 * pair);
}

TEST(ApproxSilt, PreconditionsAndHorizon) {
  SiltContext ctx(table(2.0, 1));
  const auto p = frozen_path(cloud(1, 1.0, {{0.0}}), 1.0, 0.25);
  EXPECT_THROW(approx_silt(p, ctx, 0.0, 1.0), DomainError);
  EXPECT_THROW(approx_silt(p, ctx, -0.1, 1.0), DomainError);
  EXPECT_THROW(approx_silt(p, ctx, 0.1, 2.0), DomainError);
  EXPECT_NEAR(approx_silt(p, ctx, 0.1, 0.5), 0.125 * gauss0(0.1), 1e-12);
}

TEST(RenormalizedSilt, FrozenSingleAtom) {
  SiltContext ctx(table(2.0, 1));
  const double eps = 0.1, lambda = 2.0, T = 1.0;
  const auto p = frozen_path(cloud(1, 1.0, {{0.0}}), T, 1.0 / 16.0);
  const double expect = 0.5 * gauss0(eps) * T * T - std::exp(lambda * eps) * gauss_green0(lambda, eps) * T;
  EXPECT_NEAR(renormalized_silt(p, ctx, eps, lambda, T), expect, 1e-8);
  EXPECT_THROW(renormalized_silt(p, ctx, eps, 0.0, T), DomainError);
}

TEST(Tanaka, FrozenSingleAtomHandEvaluation) {
  SiltContext ctx(table(2.0, 1));
  const double eps = 0.2, lambda = 1.5, T = 1.0;
  const double p0 = gauss0(eps), G0 = gauss_green0(lambda, eps), e = std::exp(lambda * eps);
  for (double h : {1.0 / 8.0, 1.0 / 16.0, 1.0 / 32.0}) {
    const auto p = frozen_path(cloud(1, 1.0, {{0.0}}), T, h);
    const auto tt = tanaka_terms(p, ctx, eps, lambda, T);
    const double J = T / h;
    EXPECT_NEAR(tt.gamma, 0.5 * p0 * T * T, 1e-12);
    EXPECT_NEAR(tt.T1, lambda * e * 0.5 * T * T * G0, 1e-8);
    EXPECT_NEAR(tt.T2, -e * T * G0, 1e-8);
    EXPECT_NEAR(tt.T3, e * T * G0, 1e-8);
    // each increment is -h (lambda G(0) - e^{-lambda eps} p(0)), weighted by the elapsed steps
    EXPECT_NEAR(tt.T4, -e * h * h * J * (J + 1) / 2 * (lambda * G0 - p0 / e), 1e-8);
    EXPECT_NEAR(tt.reconstructed() - tt.gamma, 0.5 * h * T * (p0 - lambda * e * G0), 1e-8);
  }
}

TEST(Tanaka, BookkeepingIdentities) {
  const auto p = random_path(mech(2.0, 1, 0.5, 2.0), 300, 1.0, 1.0 / 32.0, 3);
  SiltContext ctx(table(2.0, 1));
  const auto tt = tanaka_terms(p, ctx, 0.1, 1.0, 1.0);
  EXPECT_EQ(tt.gamma_tilde, tt.gamma - tt.T3);
  EXPECT_EQ(tt.reconstructed_tilde(), tt.T1 + tt.T2 + tt.T4);
  EXPECT_NEAR(approx_silt(p, ctx, 0.1, 1.0), tt.gamma, 1e-8 * tt.gamma);
  EXPECT_NEAR(renormalized_silt(p, ctx, 0.1, 1.0, 1.0), tt.gamma_tilde, 1e-8 * std::abs(tt.gamma));
  EXPECT_GE(tt.gamma, 0.0);
  EXPECT_GE(tt.T3, 0.0);
}

TEST(Tanaka, LambdaConsistency) {
  const auto p = random_path(mech(2.0, 1, 0.5, 2.0), 300, 1.0, 1.0 / 256.0, 4);
  SiltContext ctx(table(2.0, 1));
  const auto a = tanaka_terms(p, ctx, 0.2, 1.0, 1.0);
  const auto b = tanaka_terms(p, ctx, 0.2, 4.0, 1.0);
  EXPECT_NEAR(a.gamma, b.gamma, 1e-9 * a.gamma);
  const double gap = std::abs(a.gamma - a.reconstructed()) + std::abs(b.gamma - b.reconstructed());
  EXPECT_LE(std::abs(a.reconstructed() - b.reconstructed()), gap * (1.0 + 1e-12));
  EXPECT_LT(a.relative_gap(), 0.05);
}

TEST(Tanaka, StrideCoarsensTheGrid) {
  const auto p = random_path(mech(2.0, 1, 0.5, 2.0), 200, 1.0, 1.0 / 64.0, 5);
  SiltContext ctx(table(2.0, 1));
  const auto fine = tanaka_terms(p, ctx, 0.2, 1.0, 1.0, 1);
  const auto coarse = tanaka_terms(p, ctx, 0.2, 1.0, 1.0, 4);
  EXPECT_DOUBLE_EQ(coarse.dt, 4.0 * fine.dt);
  EXPECT_LT(fine.relative_gap(), coarse.relative_gap());
}

TEST(SnapshotSums, BinnedMatchesExact) {
  const auto p = random_path(mech(2.0, 2, 0.5, 2.0), 400, 0.5, 1.0 / 8.0, 6);
  const auto t = table(2.0, 2);
  const auto k1 = RadialKernel::density(t, 0.05), k2 = RadialKernel::green(t, 1.0, 0.05);
  PairSumOptions exact, binned;
  exact.backend = PairBackend::Exact;
  binned.backend = PairBackend::Binned;
  const auto e = snapshot_sums(p, {&k1, &k2}, 0.5, 1, exact);
  const auto b = snapshot_sums(p, {&k1, &k2}, 0.5, 1, binned);
  ASSERT_EQ(e.size(), 2u);
  for (int i = 0; i < 2; ++i) {
    EXPECT_NEAR(b[i].same, e[i].same, 1e-3 * e[i].same);
    EXPECT_NEAR(b[i].cross, e[i].cross, 1e-3 * e[i].cross);
    EXPECT_NEAR(b[i].terminal, e[i].terminal, 1e-3 * e[i].terminal);
  }
}

TEST(SiltSeriesTest, RowsFollowEpsOrder) {
  const auto p = random_path(mech(2.0, 1, 0.5, 2.0), 200, 1.0, 1.0 / 16.0, 7);
  SiltContext ctx(table(2.0, 1));
  const std::vector<double> eps{0.4, 0.2, 0.1};
  const auto s = silt_series(p, ctx, eps, 1.0, 1.0, "p7");
  EXPECT_EQ(s.path_id, "p7");
  ASSERT_EQ(s.rows.size(), 3u);
  for (std::size_t i = 0; i < 3; ++i) {
    EXPECT_EQ(s.rows[i].eps, eps[i]);
    EXPECT_NEAR(s.rows[i].gamma, approx_silt(p, ctx, eps[i], 1.0), 1e-8 * s.rows[i].gamma);
  }
}
