#include "siltlab/stable_kernels.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <numbers>
#include <sstream>

#include <boost/math/special_functions/bessel.hpp>
#include <boost/math/special_functions/gamma.hpp>

#include "siltlab/errors.hpp"
#include "siltlab/quadrature.hpp"

namespace siltlab {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kFloor = 1e-300;
constexpr char kMagic[4] = {'S', 'K', 'T', '1'};

static_assert(std::endian::native == std::endian::little,
              "binary table formats assume a little-endian host");

// Radius below which the Hankel integral is used; above it the Gaussian
// mixture over the subordinator density avoids cancellation in the tail.
constexpr double kHankelSwitch = 2.0;

double hankel_density(const KernelParams& p, double r) {
  const double alpha = p.alpha;
  const int d = p.dim;
  const double kmax = std::pow(40.0, 1.0 / alpha);
  const double nu = 0.5 * d - 1.0;
  auto integrand = [&](double k) {
    const double damp = std::exp(-std::pow(k, alpha));
    if (d == 1) return damp * std::cos(k * r);
    if (d == 3) return damp * k * std::sin(k * r);
    return damp * std::pow(k, 0.5 * d) * boost::math::cyl_bessel_j(nu, k * r);
  };
  const double panel = kPi / r;
  const std::size_t panels = std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(kmax / panel)));
  const double width = kmax / static_cast<double>(panels);
  double sum = 0.0;
  for (std::size_t i = 0; i < panels; ++i) {
    const double a = width * static_cast<double>(i);
    sum += quad::gauss_kronrod(integrand, a, a + width, 1e-14, 15);
  }
  if (d == 1) return sum / kPi;
  if (d == 3) return sum / (2.0 * kPi * kPi * r);
  return std::pow(2.0 * kPi, -0.5 * d) * std::pow(r, 1.0 - 0.5 * d) * sum;
}

// Kanter's function for the positive a-stable law.
double kanter_a(double a, double u) {
  const double s = std::sin(a * u);
  return std::pow(s / std::sin(u), 1.0 / (1.0 - a)) * std::sin((1.0 - a) * u) / s;
}

// p_1(r) = int f_a(s) (4 pi s)^{-d/2} exp(-r^2 / 4s) ds with f_a the density of
// S, E e^{-theta S} = e^{-theta^a}, a = alpha/2, written through Kanter's
// integral representation of f_a; both integrands are positive.
double mixture_density(const KernelParams& p, double r) {
  const double a = 0.5 * p.alpha;
  const double b = a / (1.0 - a);
  const double half_d = 0.5 * p.dim;
  const double r2 = 0.25 * r * r;
  const double pref = b / kPi * std::pow(4.0 * kPi, -half_d);

  auto inner = [&](double A) {
    // integrand in w = ln s: exp(E(w)), E = -(b + d/2) w - A e^{-b w} - r2 e^{-w}
    auto expo = [&](double w) { return -(b + half_d) * w - A * std::exp(-b * w) - r2 * std::exp(-w); };
    auto slope = [&](double w) { return -(b + half_d) + A * b * std::exp(-b * w) + r2 * std::exp(-w); };
    double lo = -1.0, hi = 1.0;
    while (slope(lo) < 0.0) lo -= 2.0;
    while (slope(hi) > 0.0) hi += 2.0;
    for (int it = 0; it < 200 && hi - lo > 1e-12 * (1.0 + std::abs(lo)); ++it) {
      const double mid = 0.5 * (lo + hi);
      (slope(mid) > 0.0 ? lo : hi) = mid;
    }
    const double mode = 0.5 * (lo + hi);
    const double top = expo(mode);
    double left = mode - 0.5, right = mode + 0.5;
    while (expo(left) > top - 46.0) left -= 0.5 + (mode - left);
    while (expo(right) > top - 46.0) right += 0.5 + (right - mode);
    auto f = [&](double w) { return std::exp(expo(w) - top); };
    const double mid1 = mode - 0.25 * (mode - left);
    const double mid2 = mode + 0.25 * (right - mode);
    const double val = quad::gauss_kronrod(f, left, mid1, 1e-13, 12) +
                       quad::gauss_kronrod(f, mid1, mid2, 1e-13, 12) +
                       quad::gauss_kronrod(f, mid2, right, 1e-13, 12);
    return val * std::exp(top);
  };
  auto outer = [&](double u) {
    const double A = kanter_a(a, u);
    if (!std::isfinite(A) || A > 1e300) return 0.0;
    return A * inner(A);
  };
  return pref * quad::tanh_sinh(outer, 0.0, kPi, 1e-12);
}

void write_f64(std::ofstream& os, double v) { os.write(reinterpret_cast<const char*>(&v), 8); }
void write_u64(std::ofstream& os, std::uint64_t v) { os.write(reinterpret_cast<const char*>(&v), 8); }
double read_f64(std::ifstream& is) {
  double v;
  is.read(reinterpret_cast<char*>(&v), 8);
  return v;
}
std::uint64_t read_u64(std::ifstream& is) {
  std::uint64_t v;
  is.read(reinterpret_cast<char*>(&v), 8);
  return v;
}

}  // namespace

void KernelParams::validate() const {
  if (!(alpha > 0.0 && alpha <= 2.0)) throw DomainError("alpha must lie in (0, 2]");
  if (dim < 1) throw DomainError("dimension must be at least 1");
}

double fourier_exponent(double alpha, double z) {
  z = std::abs(z);
  return alpha == 2.0 ? 0.5 * z * z : std::pow(z, alpha);
}

double sphere_area(int dim) {
  return 2.0 * std::pow(kPi, 0.5 * dim) / std::tgamma(0.5 * dim);
}

double unit_density_at_origin(const KernelParams& p) {
  p.validate();
  if (p.alpha == 2.0) return std::pow(2.0 * kPi, -0.5 * p.dim);
  return std::pow(2.0 * kPi, -p.dim) * sphere_area(p.dim) * std::tgamma(p.dim / p.alpha) / p.alpha;
}

bool has_closed_form(const KernelParams& p) { return p.alpha == 2.0 || p.alpha == 1.0; }

double unit_density_closed_form(const KernelParams& p, double r) {
  if (p.alpha == 2.0) return std::pow(2.0 * kPi, -0.5 * p.dim) * std::exp(-0.5 * r * r);
  if (p.alpha == 1.0) {
    const double h = 0.5 * (p.dim + 1);
    return std::tgamma(h) / std::pow(kPi, h) * std::pow(1.0 + r * r, -h);
  }
  throw ConfigurationError("no closed form for this stability index");
}

double unit_density_inversion(const KernelParams& p, double r) {
  p.validate();
  r = std::abs(r);
  if (p.alpha == 2.0) return unit_density_closed_form(p, r);
  if (r == 0.0) return unit_density_at_origin(p);
  if (r <= kHankelSwitch) return hankel_density(p, r);
  return mixture_density(p, r);
}

std::vector<double> RadialGrid::radii() const {
  if (!(r_min > 0.0 && r_max > r_min) || points < 8)
    throw ConfigurationError("radial grid needs 0 < r_min < r_max and at least 8 points");
  std::vector<double> out(points);
  const double u0 = std::log(r_min), u1 = std::log(r_max);
  for (std::size_t i = 0; i < points; ++i)
    out[i] = std::exp(u0 + (u1 - u0) * static_cast<double>(i) / static_cast<double>(points - 1));
  out.front() = r_min;
  out.back() = r_max;
  return out;
}

// ---------------------------------------------------------------- interpolant

LogLogInterpolant::LogLogInterpolant(std::vector<double> radii, std::vector<double> values)
    : radii_(std::move(radii)), values_(std::move(values)) {
  const std::size_t n = radii_.size();
  if (n < 5 || values_.size() != n) throw ConfigurationError("interpolant needs >= 5 matching samples");
  u0_ = std::log(radii_.front());
  du_ = (std::log(radii_.back()) - u0_) / static_cast<double>(n - 1);
  logv_.resize(n);
  for (std::size_t i = 0; i < n; ++i) logv_[i] = std::log(std::max(values_[i], kFloor));
  slope_.resize(n);
  const auto& f = logv_;
  const double h = du_;
  for (std::size_t i = 0; i < n; ++i) {
    if (i >= 2 && i + 2 < n)
      slope_[i] = (-f[i + 2] + 8.0 * f[i + 1] - 8.0 * f[i - 1] + f[i - 2]) / (12.0 * h);
    else if (i == 0)
      slope_[i] = (-3.0 * f[0] + 4.0 * f[1] - f[2]) / (2.0 * h);
    else if (i == n - 1)
      slope_[i] = (3.0 * f[n - 1] - 4.0 * f[n - 2] + f[n - 3]) / (2.0 * h);
    else
      slope_[i] = (f[i + 1] - f[i - 1]) / (2.0 * h);
  }
  tail_exponent_ = (f[n - 1] - f[n - 2]) / h;
  head_exponent_ = (f[1] - f[0]) / h;
}

double LogLogInterpolant::operator()(double r) const {
  const std::size_t n = radii_.size();
  if (r <= radii_.front()) return values_.front() * std::pow(r / radii_.front(), head_exponent_);
  if (r >= radii_.back()) return values_.back() * std::pow(r / radii_.back(), tail_exponent_);
  const double x = (std::log(r) - u0_) / du_;
  std::size_t i = std::min(static_cast<std::size_t>(x), n - 2);
  const double s = x - static_cast<double>(i);
  const double s2 = s * s, s3 = s2 * s;
  const double h00 = 2 * s3 - 3 * s2 + 1, h10 = s3 - 2 * s2 + s;
  const double h01 = -2 * s3 + 3 * s2, h11 = s3 - s2;
  const double lv = h00 * logv_[i] + h10 * du_ * slope_[i] + h01 * logv_[i + 1] + h11 * du_ * slope_[i + 1];
  return std::exp(lv);
}

// ---------------------------------------------------------------- KernelTable

KernelTable::KernelTable(KernelParams p, std::vector<double> radii, std::vector<double> values)
    : params_(p), interp_(std::move(radii), std::move(values)),
      origin_(unit_density_at_origin(p)), bypass_(p.alpha == 2.0) {}

KernelTable KernelTable::build(const KernelParams& p, const RadialGrid& grid) {
  p.validate();
  auto radii = grid.radii();
  std::vector<double> values(radii.size());
  for (std::size_t i = 0; i < radii.size(); ++i)
    values[i] = std::max(unit_density_inversion(p, radii[i]), kFloor);
  return KernelTable(p, std::move(radii), std::move(values));
}

double KernelTable::unit(double r) const {
  r = std::abs(r);
  if (bypass_) return unit_density_closed_form(params_, r);
  const double r0 = interp_.radii().front();
  if (r < r0) {
    const double q = r / r0;
    return origin_ + (interp_.values().front() - origin_) * q * q;
  }
  return interp_(r);
}

double KernelTable::density(double t, double r) const {
  if (!(t > 0.0)) throw DomainError("stable density needs t > 0");
  const double scale = std::pow(t, -1.0 / params_.alpha);
  return std::pow(scale, params_.dim) * unit(r * scale);
}

double KernelTable::total_mass() const {
  const int d = params_.dim;
  const auto r = interp_.radii();
  const double sd = sphere_area(d);
  double sum = quad::gauss_kronrod([&](double x) { return unit(x) * std::pow(x, d - 1); }, 0.0, r.front(), 1e-13, 10);
  for (std::size_t i = 0; i + 1 < r.size(); ++i) {
    auto f = [&](double u) {
      const double x = std::exp(u);
      return unit(x) * std::pow(x, d);
    };
    sum += quad::gauss_kronrod(f, std::log(r[i]), std::log(r[i + 1]), 1e-13, 8);
  }
  if (!bypass_) {
    // p_1(x) ~ a x^{-d-alpha} + b x^{-d-2 alpha}, matched at two far grid points
    const double a = params_.alpha;
    const double x2 = r.back(), x1 = r[r.size() - 1 - std::min<std::size_t>(32, r.size() - 1)];
    const double u1 = unit(x1) * std::pow(x1, d + a), u2 = unit(x2) * std::pow(x2, d + a);
    const double w1 = std::pow(x1, -a), w2 = std::pow(x2, -a);
    const double b = (u1 - u2) / (w1 - w2);
    const double c = u2 - b * w2;
    sum += c * w2 / a + b * w2 * w2 / (2.0 * a);
  }
  return sd * sum;
}

void KernelTable::dump(const std::filesystem::path& file) const {
  std::ofstream os(file, std::ios::binary);
  if (!os) throw ConfigurationError("cannot open " + file.string() + " for writing");
  os.write(kMagic, 4);
  write_f64(os, params_.alpha);
  write_f64(os, static_cast<double>(params_.dim));
  const auto r = radii();
  const auto v = values();
  write_u64(os, r.size());
  for (double x : r) write_f64(os, x);
  for (double x : v) write_f64(os, x);
}

KernelTable KernelTable::load(const std::filesystem::path& file) {
  std::ifstream is(file, std::ios::binary);
  if (!is) throw ConfigurationError("cannot open " + file.string());
  char magic[4];
  is.read(magic, 4);
  if (!is || std::memcmp(magic, kMagic, 4) != 0) throw ConfigurationError("not an SKT1 table: " + file.string());
  KernelParams p;
  p.alpha = read_f64(is);
  p.dim = static_cast<int>(read_f64(is));
  const std::uint64_t n = read_u64(is);
  if (!is || n < 5 || n > (1u << 26)) throw ConfigurationError("corrupt SKT1 header");
  std::vector<double> r(n), v(n);
  for (auto& x : r) x = read_f64(is);
  for (auto& x : v) x = read_f64(is);
  if (!is) throw ConfigurationError("truncated SKT1 table");
  p.validate();
  return KernelTable(p, std::move(r), std::move(v));
}

// ---------------------------------------------------------------- cache

const KernelTable& KernelCache::build(const KernelParams& p, const RadialGrid& grid) {
  auto it = tables_.find(p);
  if (it != tables_.end()) return it->second;
  return tables_.emplace(p, KernelTable::build(p, grid)).first->second;
}

const KernelTable& KernelCache::get(const KernelParams& p) const {
  auto it = tables_.find(p);
  if (it == tables_.end()) {
    std::ostringstream msg;
    msg << "kernel table for alpha=" << p.alpha << ", d=" << p.dim << " has not been built";
    throw ConfigurationError(msg.str());
  }
  return it->second;
}

namespace {
double norm(std::span<const double> x) {
  double s = 0.0;
  for (double v : x) s += v * v;
  return std::sqrt(s);
}
}  // namespace

double stable_density(const KernelTable& table, double t, std::span<const double> x) {
  if (!(t > 0.0)) throw DomainError("stable density needs t > 0");
  if (static_cast<int>(x.size()) != table.dim()) throw DomainError("point dimension does not match table");
  const auto& p = table.params();
  if (has_closed_form(p)) {
    const double scale = std::pow(t, -1.0 / p.alpha);
    return std::pow(scale, p.dim) * unit_density_closed_form(p, norm(x) * scale);
  }
  return table.density(t, norm(x));
}

double stable_density(const KernelCache& cache, const KernelParams& p, double t,
                      std::span<const double> x) {
  p.validate();
  if (!(t > 0.0)) throw DomainError("stable density needs t > 0");
  if (static_cast<int>(x.size()) != p.dim) throw DomainError("point dimension does not match parameters");
  if (p.alpha == 2.0) {
    const double scale = std::pow(t, -0.5);
    return std::pow(scale, p.dim) * unit_density_closed_form(p, norm(x) * scale);
  }
  return stable_density(cache.get(p), t, x);
}

// ---------------------------------------------------------------- sampling

double sample_positive_stable(double a, Rng& rng) {
  std::uniform_real_distribution<double> unif(0.0, kPi);
  std::exponential_distribution<double> expo(1.0);
  double u = 0.0;
  while (u == 0.0) u = unif(rng);
  const double e = expo(rng);
  return std::pow(kanter_a(a, u) / e, (1.0 - a) / a);
}

void sample_stable_increment(const KernelParams& p, double t, Rng& rng, std::span<double> out) {
  if (!(t > 0.0)) throw DomainError("stable increment needs t > 0");
  std::normal_distribution<double> gauss(0.0, 1.0);
  double scale;
  if (p.alpha == 2.0) {
    scale = std::sqrt(t);
  } else {
    const double a = 0.5 * p.alpha;
    // S_t = t^{1/a} S_1 has Laplace transform exp(-t s^a); X = sqrt(2 S_t) N.
    scale = std::sqrt(2.0 * std::pow(t, 1.0 / a) * sample_positive_stable(a, rng));
  }
  for (auto& v : out) v = scale * gauss(rng);
}

}  // namespace siltlab
