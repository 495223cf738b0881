#pragma once

// Isotropic alpha-stable transition densities and the time-integrated
// (Green) kernels built from them.
//
// Convention: the semigroup S_t has Fourier multiplier exp(-t * psi(z)) with
//   psi(z) = |z|^alpha        for 0 < alpha < 2,
//   psi(z) = |z|^2 / 2        for alpha = 2 (standard Brownian motion).
// All densities p_t, Green functions and samplers follow this convention.

#include <filesystem>
#include <map>
#include <random>
#include <span>
#include <utility>
#include <vector>

namespace siltlab {

using Rng = std::mt19937_64;

/// The spatial part of the model: stability index and dimension.
struct KernelParams {
  double alpha = 2.0;
  int dim = 1;

  void validate() const;
  bool operator<(const KernelParams& o) const {
    return std::pair(alpha, dim) < std::pair(o.alpha, o.dim);
  }
};

/// Fourier exponent psi(|z|) of the semigroup.
double fourier_exponent(double alpha, double z);

/// Area of the unit sphere S^{d-1}.
double sphere_area(int dim);

/// p_1(0) in closed form: (2pi)^{-d} |S^{d-1}| Gamma(d/alpha)/alpha (alpha < 2).
double unit_density_at_origin(const KernelParams& p);

/// p_1(r) from the radial Fourier inversion (Hankel integral) near the origin
/// and from the Gaussian mixture over the subordinator density further out.
/// Slow; used to build tables.
double unit_density_inversion(const KernelParams& p, double r);

/// Closed forms where they exist: Gaussian (alpha = 2) and Cauchy (alpha = 1).
bool has_closed_form(const KernelParams& p);
double unit_density_closed_form(const KernelParams& p, double r);

struct RadialGrid {
  double r_min = 1e-4;
  double r_max = 1e3;
  std::size_t points = 512;

  std::vector<double> radii() const;
};

/// Cubic Hermite interpolation of log(value) against log(radius) on a
/// log-uniform grid, with power-law extrapolation at both ends.
class LogLogInterpolant {
 public:
  LogLogInterpolant() = default;
  LogLogInterpolant(std::vector<double> radii, std::vector<double> values);

  double operator()(double r) const;
  double tail_exponent() const { return tail_exponent_; }
  double head_exponent() const { return head_exponent_; }
  std::span<const double> radii() const { return radii_; }
  std::span<const double> values() const { return values_; }

 private:
  std::vector<double> radii_;
  std::vector<double> values_;
  std::vector<double> logv_;
  std::vector<double> slope_;
  double u0_ = 0.0;
  double du_ = 1.0;
  double tail_exponent_ = 0.0;
  double head_exponent_ = 0.0;
};

/// Tabulated radial profile of p_1 for one (alpha, d).
///
/// For alpha = 2 the table holds the Gaussian values and evaluation bypasses
/// interpolation entirely.
class KernelTable {
 public:
  static KernelTable build(const KernelParams& p, const RadialGrid& grid = {});
  static KernelTable load(const std::filesystem::path& file);
  void dump(const std::filesystem::path& file) const;

  const KernelParams& params() const { return params_; }
  double alpha() const { return params_.alpha; }
  int dim() const { return params_.dim; }
  std::span<const double> radii() const { return interp_.radii(); }
  std::span<const double> values() const { return interp_.values(); }
  /// Decay power used beyond the last grid point (fitted from the last two).
  double tail_exponent() const { return interp_.tail_exponent(); }
  double at_origin() const { return origin_; }

  /// p_1(r) for r >= 0.
  double unit(double r) const;
  /// p_t(r) = t^{-d/alpha} p_1(t^{-1/alpha} r).
  double density(double t, double r) const;

  /// Integral of p_1 over R^d using the interpolant and the fitted tails.
  double total_mass() const;

 private:
  KernelTable(KernelParams p, std::vector<double> radii, std::vector<double> values);

  KernelParams params_;
  LogLogInterpolant interp_;
  double origin_ = 0.0;
  bool bypass_ = false;
};

/// Tables keyed by (alpha, d); lookups of unbuilt entries are configuration errors.
class KernelCache {
 public:
  const KernelTable& build(const KernelParams& p, const RadialGrid& grid = {});
  const KernelTable& get(const KernelParams& p) const;
  bool contains(const KernelParams& p) const { return tables_.contains(p); }

 private:
  std::map<KernelParams, KernelTable> tables_;
};

double stable_density(const KernelTable& table, double t, std::span<const double> x);
double stable_density(const KernelCache& cache, const KernelParams& p, double t,
                      std::span<const double> x);

/// Draws X with E exp(i z.X) = exp(-t psi(z)) into `out` (size d).
///
/// alpha = 2: N(0, t I). alpha < 2: X = sqrt(2 S) N with S a positive
/// (alpha/2)-stable variable with Laplace transform exp(-t s^{alpha/2}),
/// drawn with Kanter's form of the Chambers-Mallows-Stuck construction.
void sample_stable_increment(const KernelParams& p, double t, Rng& rng,
                             std::span<double> out);

/// Positive a-stable variable, a in (0,1), with E exp(-s S) = exp(-s^a).
double sample_positive_stable(double a, Rng& rng);

/// c(alpha, d) = Gamma((d-alpha)/2) / (2^{alpha/2} pi^{d/2} Gamma(alpha/2)).
double green_constant(double alpha, int dim);

/// Constant c with G^{0,0}(x) = c |x|^{alpha-d} for the semigroup above.
double riesz_green_constant(double alpha, int dim);

/// Tabulated G^{lambda,eps}(r) = int_eps^inf e^{-lambda t} p_t(r) dt.
class GreenTable {
 public:
  static GreenTable build(const KernelTable& kernel, double lambda, double eps,
                          const RadialGrid& grid = {});

  double lambda() const { return lambda_; }
  double eps() const { return eps_; }
  bool closed_form() const { return closed_form_; }
  const KernelParams& params() const { return params_; }
  std::span<const double> radii() const { return interp_.radii(); }
  std::span<const double> values() const { return interp_.values(); }

  bool finite_at_origin() const { return origin_finite_; }
  /// G^{lambda,eps}(0); throws SingularEvaluation if infinite.
  double at_origin() const;
  /// G^{lambda,eps}(r); throws SingularEvaluation at r = 0 when infinite.
  double operator()(double r) const;

 private:
  KernelParams params_;
  double lambda_ = 0.0;
  double eps_ = 0.0;
  bool closed_form_ = false;
  bool origin_finite_ = false;
  double origin_ = 0.0;
  double riesz_c_ = 0.0;
  LogLogInterpolant interp_;
};

/// G^{lambda,eps}(r) by direct time quadrature against the kernel table.
double green_quadrature(const KernelTable& kernel, double lambda, double eps, double r);

double green_value(const GreenTable& g, std::span<const double> x);

/// Fourier transform of the tabulated kernel at |z|; the far tail beyond the
/// grid is added analytically only at z = 0.
double radial_fourier_transform(const GreenTable& g, double z);

/// max_z |(lambda + psi(z)) G^(z) - exp(-eps (lambda + psi(z)))| with G^ the
/// numerical transform of the tabulated G^{lambda,eps}.
double fourier_resolvent_residual(const KernelTable& kernel, double lambda, double eps,
                                  std::span<const double> zgrid,
                                  const RadialGrid& grid = {});

/// Least-squares slope of log y against log x.
double loglog_slope(std::span<const double> x, std::span<const double> y);

struct RieszFit {
  double slope = 0.0;
  std::vector<double> separations;
  std::vector<double> values;
};

/// Convolves |x|^{a-d} with |x|^{b-d} numerically at the given separations and
/// fits the log-log slope (expected a + b - d).
RieszFit riesz_exponent_check(double a, double b, int dim, std::span<const double> separations);

/// int_{R^d} |z|^{a-d} |z - s e_1|^{b-d} dz by nested quadrature.
double riesz_convolution(double a, double b, int dim, double s);

struct EnvelopeResult {
  bool pass = false;
  double fitted_c = 0.0;
  double test_max_ratio = 0.0;
};

/// Fits the smallest c with p_t(x) <= c t^{delta-1} |x|^{alpha-d-alpha delta}
/// on `fit_points` and checks the ratio stays within 5% of c on `test_points`.
EnvelopeResult density_envelope_check(const KernelTable& kernel, double delta,
                                      std::span<const std::pair<double, double>> fit_points,
                                      std::span<const std::pair<double, double>> test_points);

}  // namespace siltlab
