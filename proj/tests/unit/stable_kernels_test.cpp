#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <complex>
#include <filesystem>
#include <numbers>
#include <vector>

#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>

#include "siltlab/errors.hpp"
#include "siltlab/stable_kernels.hpp"

using namespace siltlab;
namespace bq = boost::math::quadrature;
using std::numbers::pi;

namespace {

const KernelTable& table_1_5_d1() {
  static const KernelTable t = KernelTable::build({1.5, 1});
  return t;
}

// (1/pi) int_0^inf cos(z r) exp(-z^alpha) dz, the d = 1 inversion done independently.
double inversion_d1(double alpha, double r) {
  double total = 0.0;
  bq::gauss_kronrod<double, 61> gk;
  for (double a = 0.0; a < 40.0; a += 0.25)
    total += gk.integrate([&](double z) { return std::cos(z * r) * std::exp(-std::pow(z, alpha)); }, a, a + 0.25, 0, 1e-14);
  return total / pi;
}

const GreenTable& green_1_5_d1() {
  static const GreenTable g = GreenTable::build(table_1_5_d1(), 1.0, 0.0);
  return g;
}

double ks_two_sample(std::vector<double> a, std::vector<double> b) {
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  std::size_t i = 0, j = 0;
  double d = 0.0;
  while (i < a.size() && j < b.size()) {
    const double x = std::min(a[i], b[j]);
    while (i < a.size() && a[i] <= x) ++i;
    while (j < b.size() && b[j] <= x) ++j;
    d = std::max(d, std::abs(double(i) / a.size() - double(j) / b.size()));
  }
  return d;
}

}  // namespace

TEST(StableDensity, GaussianClosedForm) {
  const KernelTable g = KernelTable::build({2.0, 1});
  const std::vector<double> x0{0.0};
  EXPECT_NEAR(stable_density(g, 0.25, x0), 1.0 / std::sqrt(2.0 * pi * 0.25), 1e-12);
  const std::vector<double> x1{0.7};
  EXPECT_NEAR(stable_density(g, 0.5, x1), std::exp(-0.49) / std::sqrt(pi), 1e-12);
}

TEST(StableDensity, CauchyAtOrigin) {
  const KernelTable c = KernelTable::build({1.0, 1});
  const std::vector<double> x0{0.0};
  EXPECT_NEAR(stable_density(c, 1.0, x0), inversion_d1(1.0, 0.0), 1e-10);
  EXPECT_NEAR(stable_density(c, 1.0, x0), 1.0 / pi, 1e-10);
  for (double r : {0.1, 1.0, 5.0, 50.0}) EXPECT_NEAR(c.unit(r), 1.0 / (pi * (1.0 + r * r)), 1e-6 / (1.0 + r * r));
}

TEST(StableDensity, TableMatchesInversionQuadrature) {
  const auto& t = table_1_5_d1();
  for (double r : {0.0, 0.3, 1.0, 2.5, 6.0}) {
    const double ref = inversion_d1(1.5, r);
    EXPECT_NEAR(t.unit(r), ref, 1e-6 * ref) << "r = " << r;
  }
}

TEST(StableDensity, ScalingLawAtOrigin) {
  const auto& t = table_1_5_d1();
  const std::vector<double> x0{0.0};
  for (double s : {0.01, 0.3, 4.0})
    EXPECT_NEAR(stable_density(t, s, x0), std::pow(s, -1.0 / 1.5) * stable_density(t, 1.0, x0), 1e-12);
}

TEST(StableDensity, ScalingLawOffOrigin) {
  const auto& t = table_1_5_d1();
  for (double s : {0.05, 2.0})
    for (double r : {0.2, 1.7}) {
      const std::vector<double> x{r};
      const std::vector<double> y{r * std::pow(s, -1.0 / 1.5)};
      EXPECT_NEAR(stable_density(t, s, x), std::pow(s, -1.0 / 1.5) * stable_density(t, 1.0, y), 1e-9);
    }
}

TEST(StableDensity, RadialMassIsOne) {
  EXPECT_NEAR(table_1_5_d1().total_mass(), 1.0, 1e-6);
  const KernelTable t2 = KernelTable::build({1.2, 2});
  EXPECT_NEAR(t2.total_mass(), 1.0, 1e-6);
}

TEST(StableDensity, Errors) {
  const auto& t = table_1_5_d1();
  const std::vector<double> x0{0.0};
  EXPECT_THROW(stable_density(t, 0.0, x0), DomainError);
  EXPECT_THROW(stable_density(t, -1.0, x0), DomainError);
  KernelCache cache;
  EXPECT_THROW(stable_density(cache, KernelParams{1.5, 1}, 1.0, x0), ConfigurationError);
  cache.build({1.0, 1});
  EXPECT_NEAR(stable_density(cache, KernelParams{1.0, 1}, 1.0, x0), 1.0 / pi, 1e-10);
}

TEST(StableDensity, Skt1RoundTrip) {
  const auto file = std::filesystem::temp_directory_path() / "siltlab_unit_table.skt1";
  table_1_5_d1().dump(file);
  const KernelTable back = KernelTable::load(file);
  EXPECT_EQ(back.alpha(), 1.5);
  EXPECT_EQ(back.dim(), 1);
  ASSERT_EQ(back.values().size(), table_1_5_d1().values().size());
  for (double r : {0.0, 0.5, 3.0, 2000.0}) EXPECT_EQ(back.unit(r), table_1_5_d1().unit(r));
  std::filesystem::remove(file);
}

TEST(StableSampling, GaussianVariance) {
  Rng rng(11);
  const int N = 100000;
  std::vector<double> x(2);
  double s2 = 0.0;
  for (int i = 0; i < N; ++i) {
    sample_stable_increment({2.0, 2}, 1.0, rng, x);
    s2 += x[0] * x[0];
  }
  EXPECT_NEAR(s2 / N, 1.0, 0.02);
}

TEST(StableSampling, EmpiricalCharacteristicFunction) {
  Rng rng(12);
  const int N = 100000;
  std::vector<double> x(2);
  std::vector<double> c(N);
  for (int i = 0; i < N; ++i) {
    sample_stable_increment({1.5, 2}, 1.0, rng, x);
    c[i] = std::cos(0.6 * x[0] + 0.8 * x[1]);
  }
  double m = 0.0, v = 0.0;
  for (double ci : c) m += ci;
  m /= N;
  for (double ci : c) v += (ci - m) * (ci - m);
  const double se = std::sqrt(v / (N - 1) / N);
  EXPECT_LT(std::abs(m - std::exp(-1.0)), 3.0 * se);
}

TEST(StableSampling, ScalingInLaw) {
  Rng rng(13);
  const int N = 20000;
  std::vector<double> a(N), b(N), x(1);
  for (int i = 0; i < N; ++i) {
    sample_stable_increment({1.5, 1}, 2.0, rng, x);
    a[i] = x[0];
    sample_stable_increment({1.5, 1}, 1.0, rng, x);
    b[i] = x[0] * std::pow(2.0, 1.0 / 1.5);
  }
  // two-sample critical value at the 1% level
  EXPECT_LT(ks_two_sample(a, b), 1.63 * std::sqrt(2.0 / N));
}

TEST(GreenConstant, GammaRatio) {
  auto c = [](double a, int d) {
    return std::tgamma((d - a) / 2) / (std::pow(2.0, a / 2) * std::pow(pi, d / 2.0) * std::tgamma(a / 2));
  };
  EXPECT_NEAR(green_constant(1.0, 3), 0.07165, 1e-5);
  EXPECT_NEAR(green_constant(1.0, 3), c(1.0, 3), 1e-14);
  EXPECT_NEAR(green_constant(1.0, 2), 1.0 / (std::sqrt(2.0) * pi), 1e-14);
  EXPECT_NEAR(green_constant(2.0, 3), c(2.0, 3), 1e-14);
  EXPECT_NEAR(green_constant(2.0, 3), 0.15915, 1e-5);
  EXPECT_THROW(green_constant(2.0, 2), DomainError);
  EXPECT_THROW(green_constant(1.5, 1), DomainError);
}

TEST(GreenTable, RieszClosedFormMatchesQuadrature) {
  const KernelTable t = KernelTable::build({1.0, 3});
  const GreenTable g = GreenTable::build(t, 0.0, 0.0);
  EXPECT_TRUE(g.closed_form());
  // Fourier multiplier |z|^{-alpha}: Gamma((d-a)/2) / (2^a pi^{d/2} Gamma(a/2))
  const double riesz = std::tgamma(1.0) / (2.0 * std::pow(pi, 1.5) * std::tgamma(0.5));
  EXPECT_NEAR(g(1.0), riesz, 1e-12);
  EXPECT_NEAR(g(2.0), riesz / 4.0, 1e-12);
  const std::vector<double> origin{0.0, 0.0, 0.0};
  EXPECT_THROW(green_value(g, origin), SingularEvaluation);
  EXPECT_NEAR(green_quadrature(t, 0.0, 0.0, 1.5), riesz / 2.25, 1e-6 * riesz);
}

TEST(GreenTable, GaussianResolventClosedForm) {
  // psi = |z|^2 / 2 in d = 1: G^{1,0}(x) = exp(-sqrt(2)|x|) / sqrt(2)
  const KernelTable t = KernelTable::build({2.0, 1});
  const GreenTable g = GreenTable::build(t, 1.0, 0.0);
  for (double r : {0.01, 0.5, 1.0, 4.0})
    EXPECT_NEAR(g(r), std::exp(-std::sqrt(2.0) * r) / std::sqrt(2.0), 1e-7 * std::exp(-std::sqrt(2.0) * r));
  // G^{lambda,eps}(0) = erfc(sqrt(lambda eps)) / sqrt(2 lambda)
  const GreenTable ge = GreenTable::build(t, 2.0, 0.1);
  EXPECT_NEAR(ge.at_origin(), std::erfc(std::sqrt(0.2)) / 2.0, 1e-8);
}

TEST(GreenTable, UnitMassAtLambdaOne) {
  const GreenTable& g = green_1_5_d1();
  bq::exp_sinh<double> es;
  const double tail = es.integrate([&](double r) { return g(r); }, 1.0, std::numeric_limits<double>::infinity());
  bq::tanh_sinh<double> ts;
  const double head = ts.integrate([&](double r) { return g(r); }, 0.0, 1.0);
  EXPECT_NEAR(2.0 * (head + tail), 1.0, 1e-5);
}

TEST(GreenTable, MonotoneInEps) {
  const GreenTable& g0 = green_1_5_d1();
  const GreenTable g5 = GreenTable::build(table_1_5_d1(), 1.0, 0.5);
  for (double r = 1e-3; r < 100.0; r *= 1.7) EXPECT_LE(g5(r), g0(r) * (1.0 + 1e-12)) << r;
}

TEST(GreenTable, FourierResolventGaussian) {
  const KernelTable t = KernelTable::build({2.0, 1});
  std::vector<double> z;
  for (double v = 0.0; v <= 10.0; v += 0.5) z.push_back(v);
  EXPECT_LT(fourier_resolvent_residual(t, 1.0, 0.0, z), 1e-8);
}

TEST(GreenTable, TotalMassIdentity) {
  EXPECT_NEAR(radial_fourier_transform(green_1_5_d1(), 0.0), 1.0, 1e-8);
}

TEST(RieszExponent, SlopesAndSymmetry) {
  const std::vector<double> s{0.5, 1.0, 2.0, 4.0};
  EXPECT_NEAR(riesz_exponent_check(1.0, 1.0, 3, s).slope, -1.0, 0.02);
  EXPECT_NEAR(riesz_exponent_check(0.5, 0.5, 2, s).slope, -1.0, 0.02);
  EXPECT_NEAR(riesz_exponent_check(0.5, 1.0, 3, s).slope, riesz_exponent_check(1.0, 0.5, 3, s).slope, 1e-6);
  EXPECT_THROW(riesz_exponent_check(1.5, 1.0, 2, s), DomainError);
}

TEST(RieszExponent, LogLogSlope) {
  const std::vector<double> x{1.0, 2.0, 4.0}, y{3.0, 3.0 / 8.0, 3.0 / 64.0};
  EXPECT_NEAR(loglog_slope(x, y), -3.0, 1e-12);
  EXPECT_THROW(loglog_slope(std::vector<double>{1.0}, std::vector<double>{1.0}), DomainError);
}

TEST(DensityEnvelope, BoundedRatio) {
  std::vector<std::pair<double, double>> fit, test;
  for (double t = 1e-3; t <= 1.0; t *= 1.25)
    for (double r = 1e-2; r <= 1.0; r *= 1.1) fit.emplace_back(t, r);
  for (double t = 1.1e-4; t <= 1.0; t *= 1.7)
    for (double r = 1.3e-3; r <= 3.0; r *= 1.3) test.emplace_back(t, r);
  const KernelTable c = KernelTable::build({1.0, 2});
  const auto res = density_envelope_check(c, 0.5, fit, test);
  EXPECT_TRUE(res.pass);
  EXPECT_GT(res.fitted_c, 0.0);
  const KernelTable g = KernelTable::build({2.0, 3});
  EXPECT_TRUE(density_envelope_check(g, 0.5, fit, test).pass);
  EXPECT_THROW(density_envelope_check(table_1_5_d1(), 0.5, fit, test), DomainError);
}
