#include "siltlab/grid_function.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <mutex>
#include <numbers>

#include "siltlab/errors.hpp"

namespace siltlab {

namespace {

std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

std::size_t ipow(std::size_t n, int d) {
  std::size_t r = 1;
  for (int i = 0; i < d; ++i) r *= n;
  return r;
}

std::size_t half_size(int dim, std::size_t n) { return ipow(n, dim - 1) * (n / 2 + 1); }

}  // namespace

void GridSpec::validate() const {
  if (dim < 1 || dim > 3) throw ConfigurationError("grids support dimensions 1 to 3");
  if (!(h > 0.0)) throw ConfigurationError("grid spacing must be positive");
  if (!(extent > 0.0) || margin < 0.0) throw ConfigurationError("grid extent must be positive and margin non-negative");
}

std::size_t GridSpec::points_per_axis() const {
  return 2 * static_cast<std::size_t>(std::ceil((extent + margin) / h - 1e-9));
}

std::size_t GridSpec::size() const { return ipow(points_per_axis(), dim); }

double GridSpec::lower() const { return -0.5 * static_cast<double>(points_per_axis()) * h; }

GridFunction::GridFunction(const GridSpec& spec) : spec_(spec) {
  spec_.validate();
  n_ = spec_.points_per_axis();
  if (spec_.size() > (std::size_t{1} << 28)) throw ConfigurationError("grid too large");
  values_.assign(spec_.size(), 0.0);
}

std::array<double, 3> GridFunction::point(std::size_t i) const {
  std::array<double, 3> x{0.0, 0.0, 0.0};
  const double lo = spec_.lower();
  for (int a = spec_.dim - 1; a >= 0; --a) {
    x[a] = lo + static_cast<double>(i % n_) * spec_.h;
    i /= n_;
  }
  return x;
}

GridFunction GridFunction::sample(const GridSpec& spec, const std::function<double(std::span<const double>)>& f) {
  GridFunction g(spec);
  for (std::size_t i = 0; i < g.values_.size(); ++i) {
    const auto x = g.point(i);
    g.values_[i] = f(std::span<const double>(x.data(), spec.dim));
  }
  return g;
}

GridFunction GridFunction::constant(const GridSpec& spec, double c) {
  GridFunction g(spec);
  std::fill(g.values_.begin(), g.values_.end(), c);
  return g;
}

double GridFunction::integral() const {
  double s = 0.0;
  for (double v : values_) s += v;
  return s * std::pow(spec_.h, spec_.dim);
}

double GridFunction::inner(const GridFunction& other) const {
  if (other.values_.size() != values_.size()) throw ConfigurationError("grid mismatch");
  double s = 0.0;
  for (std::size_t i = 0; i < values_.size(); ++i) s += values_[i] * other.values_[i];
  return s * std::pow(spec_.h, spec_.dim);
}

double GridFunction::max_abs() const {
  double m = 0.0;
  for (double v : values_) m = std::max(m, std::abs(v));
  return m;
}

GridFunction& GridFunction::operator*=(const GridFunction& other) {
  if (other.values_.size() != values_.size()) throw ConfigurationError("grid mismatch");
  for (std::size_t i = 0; i < values_.size(); ++i) values_[i] *= other.values_[i];
  return *this;
}

GridFunction& GridFunction::operator*=(double c) {
  for (double& v : values_) v *= c;
  return *this;
}

GridFunction& GridFunction::operator+=(const GridFunction& other) {
  if (other.values_.size() != values_.size()) throw ConfigurationError("grid mismatch");
  for (std::size_t i = 0; i < values_.size(); ++i) values_[i] += other.values_[i];
  return *this;
}

GridFunction operator*(GridFunction a, const GridFunction& b) { return a *= b; }

GridFunction GridFunction::widened(double margin) const {
  GridSpec s = spec_;
  const double half = std::ceil((spec_.extent + std::max(margin, spec_.margin)) / spec_.h - 1e-9) * spec_.h;
  s.margin = half - spec_.extent;
  GridFunction out(s);
  const std::size_t off = (out.n_ - n_) / 2;
  for (std::size_t i = 0; i < values_.size(); ++i) {
    std::size_t rem = i, j = 0, stride = 1;
    for (int a = spec_.dim - 1; a >= 0; --a) {
      j += (rem % n_ + off) * stride;
      rem /= n_;
      stride *= out.n_;
    }
    out.values_[j] = values_[i];
  }
  return out;
}

GridFunction GridFunction::cropped(const GridSpec& target) const {
  GridFunction out(target);
  if (out.n_ > n_ || target.h != spec_.h || target.dim != spec_.dim) throw ConfigurationError("crop target incompatible");
  const std::size_t off = (n_ - out.n_) / 2;
  for (std::size_t j = 0; j < out.values_.size(); ++j) {
    std::size_t rem = j, i = 0, stride = 1;
    for (int a = spec_.dim - 1; a >= 0; --a) {
      i += (rem % out.n_ + off) * stride;
      rem /= out.n_;
      stride *= n_;
    }
    out.values_[j] = values_[i];
  }
  return out;
}

std::vector<std::complex<double>> fft_forward(const std::vector<double>& values, int dim, std::size_t n) {
  std::vector<double> in(values);
  std::vector<std::complex<double>> out(half_size(dim, n));
  int dims[3] = {static_cast<int>(n), static_cast<int>(n), static_cast<int>(n)};
  fftw_plan plan;
  {
    std::lock_guard lock(planner_mutex());
    plan = fftw_plan_dft_r2c(dim, dims, in.data(), reinterpret_cast<fftw_complex*>(out.data()),
                             FFTW_ESTIMATE | FFTW_UNALIGNED);
  }
  fftw_execute(plan);
  {
    std::lock_guard lock(planner_mutex());
    fftw_destroy_plan(plan);
  }
  return out;
}

std::vector<double> fft_inverse(std::vector<std::complex<double>> coeffs, int dim, std::size_t n) {
  std::vector<double> out(ipow(n, dim));
  int dims[3] = {static_cast<int>(n), static_cast<int>(n), static_cast<int>(n)};
  fftw_plan plan;
  {
    std::lock_guard lock(planner_mutex());
    plan = fftw_plan_dft_c2r(dim, dims, reinterpret_cast<fftw_complex*>(coeffs.data()), out.data(),
                             FFTW_ESTIMATE | FFTW_UNALIGNED);
  }
  fftw_execute(plan);
  {
    std::lock_guard lock(planner_mutex());
    fftw_destroy_plan(plan);
  }
  const double norm = 1.0 / static_cast<double>(out.size());
  for (double& v : out) v *= norm;
  return out;
}

std::vector<double> half_spectrum_wavenumbers(int dim, std::size_t n, double h) {
  const std::size_t m = n / 2 + 1;
  std::vector<double> k(half_size(dim, n));
  const double base = 2.0 * std::numbers::pi / (static_cast<double>(n) * h);
  auto freq = [&](std::size_t i) {
    return base * (i <= n / 2 ? static_cast<double>(i) : static_cast<double>(i) - static_cast<double>(n));
  };
  for (std::size_t idx = 0; idx < k.size(); ++idx) {
    std::size_t rem = idx;
    const double kl = base * static_cast<double>(rem % m);
    rem /= m;
    double k2 = kl * kl;
    for (int a = 0; a < dim - 1; ++a) {
      const double ka = freq(rem % n);
      rem /= n;
      k2 += ka * ka;
    }
    k[idx] = std::sqrt(k2);
  }
  return k;
}

std::vector<double> half_spectrum_weights(int dim, std::size_t n) {
  const std::size_t m = n / 2 + 1;
  std::vector<double> w(half_size(dim, n));
  for (std::size_t idx = 0; idx < w.size(); ++idx) {
    const std::size_t last = idx % m;
    w[idx] = (last == 0 || (n % 2 == 0 && last == n / 2)) ? 1.0 : 2.0;
  }
  return w;
}

void apply_radial_multiplier(std::vector<double>& values, int dim, std::size_t n, double h,
                             const std::function<double(double)>& m) {
  auto c = fft_forward(values, dim, n);
  const auto k = half_spectrum_wavenumbers(dim, n, h);
  for (std::size_t i = 0; i < c.size(); ++i) c[i] *= m(k[i]);
  values = fft_inverse(std::move(c), dim, n);
}

}  // namespace siltlab
