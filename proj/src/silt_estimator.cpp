#include "siltlab/silt_estimator.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <optional>

#include "siltlab/errors.hpp"
#include "siltlab/grid_function.hpp"

namespace siltlab {

namespace {

struct Box {
  std::array<double, 3> lo{INFINITY, INFINITY, INFINITY};
  std::array<double, 3> hi{-INFINITY, -INFINITY, -INFINITY};
  int dim = 1;
  bool empty = true;

  void add(const ParticleCloud& c) {
    const auto& x = c.positions();
    for (std::size_t i = 0; i < x.size(); ++i) {
      const int a = static_cast<int>(i % dim);
      lo[a] = std::min(lo[a], x[i]);
      hi[a] = std::max(hi[a], x[i]);
      empty = false;
    }
  }
  double span() const {
    double s = 0.0;
    for (int a = 0; a < dim; ++a) s = std::max(s, hi[a] - lo[a]);
    return empty ? 0.0 : s;
  }
  double diagonal() const {
    double s = 0.0;
    for (int a = 0; a < dim; ++a) s += (hi[a] - lo[a]) * (hi[a] - lo[a]);
    return empty ? 0.0 : std::sqrt(s);
  }
  double min_lo() const { return *std::min_element(lo.begin(), lo.begin() + dim); }
};

// Radius beyond which k(r) <= tol k(0), or infinity.
double kernel_reach(const RadialKernel& k, double tol) {
  const double k0 = k.at_origin();
  double r = k.length_scale();
  for (int i = 0; i < 60; ++i, r *= 2.0)
    if (k(r) <= tol * k0) return r;
  return INFINITY;
}

std::size_t good_size(std::size_t m) {
  std::size_t best = std::numeric_limits<std::size_t>::max();
  for (std::size_t a = 1; a < 2 * m + 2; a *= 2)
    for (std::size_t b = a; b < 2 * m + 2; b *= 3)
      for (std::size_t c = b; c < 2 * m + 2; c *= 5)
        if (c >= m) best = std::min(best, c);
  return std::max<std::size_t>(best, 8);
}

struct BinGrid {
  int dim = 1;
  std::size_t n = 0;
  double h = 0.0;
  double lo = 0.0;
  std::size_t points() const {
    std::size_t p = 1;
    for (int a = 0; a < dim; ++a) p *= n;
    return p;
  }
  std::size_t half() const { return points() / n * (n / 2 + 1); }
  double volume() const { return std::pow(static_cast<double>(n) * h, dim); }
};

std::optional<BinGrid> make_grid(const Box& box, const std::vector<const RadialKernel*>& kernels,
                                 const PairSumOptions& opts) {
  if (box.empty) return std::nullopt;
  double ell = INFINITY, reach = 0.0;
  for (const auto* k : kernels) {
    if (!k->finite_at_origin()) return std::nullopt;
    ell = std::min(ell, k->length_scale());
    reach = std::max(reach, kernel_reach(*k, opts.tail_tolerance));
  }
  if (!std::isfinite(reach)) return std::nullopt;
  BinGrid g;
  g.dim = box.dim;
  g.h = opts.bin_fraction * ell;
  const double cells = (box.span() + reach) / g.h + 4.0;
  if (!(cells < 1e9)) return std::nullopt;
  g.n = good_size(static_cast<std::size_t>(std::ceil(cells)));
  if (std::pow(static_cast<double>(g.n), g.dim) > static_cast<double>(opts.max_grid_points)) return std::nullopt;
  g.lo = box.min_lo() - g.h;
  return g;
}

std::vector<double> deposit_cic(const ParticleCloud& c, const BinGrid& g) {
  std::vector<double> v(g.points(), 0.0);
  const int d = g.dim;
  const double m = c.atom_mass();
  for (std::size_t i = 0; i < c.size(); ++i) {
    const auto x = c.point(i);
    std::array<std::size_t, 3> i0{};
    std::array<double, 3> f{};
    for (int a = 0; a < d; ++a) {
      const double u = (x[a] - g.lo) / g.h;
      const double fl = std::floor(u);
      i0[a] = static_cast<std::size_t>(fl);
      f[a] = u - fl;
    }
    for (int corner = 0; corner < (1 << d); ++corner) {
      double w = m;
      std::size_t idx = 0;
      for (int a = 0; a < d; ++a) {
        const int bit = (corner >> a) & 1;
        w *= bit ? f[a] : 1.0 - f[a];
        idx = idx * g.n + (i0[a] + bit);
      }
      v[idx] += w;
    }
  }
  return v;
}

std::vector<double> deposit_ngp(const ParticleCloud& c, const BinGrid& g) {
  std::vector<double> v(g.points(), 0.0);
  for (std::size_t i = 0; i < c.size(); ++i) {
    const auto x = c.point(i);
    std::size_t idx = 0;
    for (int a = 0; a < g.dim; ++a) idx = idx * g.n + static_cast<std::size_t>(std::floor((x[a] - g.lo) / g.h + 0.5));
    v[idx] += c.atom_mass();
  }
  return v;
}

// w(k) K^(|k|) / (W(k)^2 L^d) per half-spectrum coefficient; W is the CIC window.
std::vector<double> cic_multiplier(const BinGrid& g, const RadialKernel& k) {
  const std::size_t m = g.n / 2 + 1;
  const double base = 2.0 * M_PI / (static_cast<double>(g.n) * g.h);
  const auto weights = half_spectrum_weights(g.dim, g.n);
  std::vector<double> out(g.half());
  const double inv_vol = 1.0 / g.volume();
  auto sinc2 = [&](double kc) {
    const double x = 0.5 * kc * g.h;
    if (std::abs(x) < 1e-8) return 1.0;
    const double s = std::sin(x) / x;
    return s * s;
  };
  for (std::size_t idx = 0; idx < out.size(); ++idx) {
    std::size_t rem = idx;
    const double kl = base * static_cast<double>(rem % m);
    rem /= m;
    double k2 = kl * kl, W = sinc2(kl);
    for (int a = 0; a < g.dim - 1; ++a) {
      const std::size_t i = rem % g.n;
      rem /= g.n;
      const double ka = base * (i <= g.n / 2 ? static_cast<double>(i) : static_cast<double>(i) - static_cast<double>(g.n));
      k2 += ka * ka;
      W *= sinc2(ka);
    }
    out[idx] = weights[idx] * k.fourier(std::sqrt(k2)) / (W * W) * inv_vol;
  }
  return out;
}

double spectral_pair(const std::vector<std::complex<double>>& a, const std::vector<std::complex<double>>& b,
                     const std::vector<double>& mult) {
  double s = 0.0;
  for (std::size_t i = 0; i < mult.size(); ++i) s += mult[i] * (a[i].real() * b[i].real() + a[i].imag() * b[i].imag());
  return s;
}

double spectral_norm(const std::vector<std::complex<double>>& a, const std::vector<double>& mult) {
  double s = 0.0;
  for (std::size_t i = 0; i < mult.size(); ++i) s += mult[i] * std::norm(a[i]);
  return s;
}

// Sum over NGP bins of m_A m_B env(|c - c'|) with env(r) = k(max(0, r - delta)) or k(r + delta).
std::pair<double, double> ngp_bracket(const ParticleCloud& A, const ParticleCloud& B, const BinGrid& g,
                                      const RadialKernel& k) {
  const double delta = std::sqrt(static_cast<double>(g.dim)) * g.h;
  std::vector<double> upper(g.points()), lower(g.points());
  for (std::size_t idx = 0; idx < upper.size(); ++idx) {
    std::size_t rem = idx;
    double r2 = 0.0;
    for (int a = 0; a < g.dim; ++a) {
      const std::size_t i = rem % g.n;
      rem /= g.n;
      const double di = i <= g.n / 2 ? static_cast<double>(i) : static_cast<double>(i) - static_cast<double>(g.n);
      r2 += di * di;
    }
    const double r = std::sqrt(r2) * g.h;
    upper[idx] = r <= delta ? k.at_origin() : k(r - delta);
    lower[idx] = k(r + delta);
  }
  const auto fa = fft_forward(deposit_ngp(A, g), g.dim, g.n);
  const auto fb = fft_forward(deposit_ngp(B, g), g.dim, g.n);
  const auto weights = half_spectrum_weights(g.dim, g.n);
  auto pair_with = [&](const std::vector<double>& lattice) {
    const auto kk = fft_forward(lattice, g.dim, g.n);
    double s = 0.0;
    for (std::size_t i = 0; i < kk.size(); ++i)
      s += weights[i] * kk[i].real() * (fa[i].real() * fb[i].real() + fa[i].imag() * fb[i].imag());
    return s / static_cast<double>(g.points());
  };
  return {pair_with(lower), pair_with(upper)};
}

double exact_sum(const ParticleCloud& A, const ParticleCloud& B, const RadialKernel& k, bool exclude_self) {
  const int d = A.dim();
  const double scale = A.atom_mass() * B.atom_mass();
  const bool same = &A == &B;
  double s = 0.0;
  if (k.finite_at_origin()) {
    Box box;
    box.dim = d;
    box.add(A);
    box.add(B);
    const KernelLookup look(k, std::max(box.diagonal(), k.length_scale()) * 1.0001 + 1e-12);
    if (same) {
      for (std::size_t a = 0; a < A.size(); ++a) {
        const auto x = A.point(a);
        for (std::size_t b = a + 1; b < A.size(); ++b) {
          const auto y = A.point(b);
          double r2 = 0.0;
          for (int c = 0; c < d; ++c) r2 += (x[c] - y[c]) * (x[c] - y[c]);
          s += look(r2);
        }
      }
      s *= 2.0;
      if (!exclude_self) s += static_cast<double>(A.size()) * k.at_origin();
    } else {
      for (std::size_t a = 0; a < A.size(); ++a) {
        const auto x = A.point(a);
        for (std::size_t b = 0; b < B.size(); ++b) {
          const auto y = B.point(b);
          double r2 = 0.0;
          for (int c = 0; c < d; ++c) r2 += (x[c] - y[c]) * (x[c] - y[c]);
          s += look(r2);
        }
      }
    }
    return s * scale;
  }
  for (std::size_t a = 0; a < A.size(); ++a) {
    const auto x = A.point(a);
    for (std::size_t b = same ? a + 1 : 0; b < B.size(); ++b) {
      const auto y = B.point(b);
      double r2 = 0.0;
      for (int c = 0; c < d; ++c) r2 += (x[c] - y[c]) * (x[c] - y[c]);
      if (r2 == 0.0) throw SingularEvaluation("two atoms coincide under a kernel that is infinite at 0");
      s += (same ? 2.0 : 1.0) * k(std::sqrt(r2));
    }
  }
  return s * scale;
}

// Several kernels tabulated on one grid uniform in log(1 + r^2 / s0).
class MultiLookup {
 public:
  MultiLookup(const std::vector<const RadialKernel*>& kernels, double r_max, std::size_t points = 8192)
      : nk_(kernels.size()) {
    double ell = INFINITY;
    for (const auto* k : kernels) ell = std::min(ell, k->length_scale());
    const double s0 = ell * ell;
    inv_s0_ = 1.0 / s0;
    const double s_max = std::max(r_max * r_max, s0) * 1.0001;
    const double du = std::log1p(s_max * inv_s0_) / static_cast<double>(points - 1);
    inv_du_ = 1.0 / du;
    values_.resize((points + 1) * nk_);
    for (std::size_t i = 0; i <= points; ++i) {
      const double r = std::sqrt(s0 * std::expm1(du * static_cast<double>(i)));
      for (std::size_t q = 0; q < nk_; ++q) values_[i * nk_ + q] = i == 0 ? kernels[q]->at_origin() : (*kernels[q])(r);
    }
    last_ = points - 1;
  }
  void accumulate(double r2, double* acc) const {
    const double u = std::log1p(r2 * inv_s0_) * inv_du_;
    const std::size_t i = std::min(static_cast<std::size_t>(u), last_);
    const double f = u - static_cast<double>(i);
    const double* v = values_.data() + i * nk_;
    for (std::size_t q = 0; q < nk_; ++q) acc[q] += v[q] + f * (v[q + nk_] - v[q]);
  }

 private:
  std::size_t nk_;
  std::size_t last_ = 0;
  double inv_s0_ = 1.0, inv_du_ = 1.0;
  std::vector<double> values_;
};

double fft_cost(const BinGrid& g) {
  const double p = static_cast<double>(g.points());
  return 5.0 * p * std::log2(std::max(p, 2.0));
}

}  // namespace

PairSum pairwise_kernel_sum(const ParticleCloud& A, const ParticleCloud& B, const RadialKernel& k,
                            SelfPairPolicy policy, const PairSumOptions& opts) {
  if (A.dim() != B.dim() || A.dim() != k.params().dim) throw ConfigurationError("cloud and kernel dimensions differ");
  if (!k.finite_at_origin() && policy == SelfPairPolicy::Include)
    throw SingularEvaluation("kernel is infinite at 0: self pairs need the Exclude policy or a regularized kernel");
  const bool exclude_self = &A == &B && policy == SelfPairPolicy::Exclude;
  PairSum out;
  if (A.size() == 0 || B.size() == 0) return out;

  const double pairs = static_cast<double>(A.size()) * static_cast<double>(B.size());
  std::optional<BinGrid> grid;
  if (opts.backend != PairBackend::Exact) {
    Box box;
    box.dim = A.dim();
    box.add(A);
    box.add(B);
    grid = make_grid(box, {&k}, opts);
    if (opts.backend == PairBackend::Binned && !grid)
      throw ConfigurationError("binned pair sum infeasible: kernel singular, heavy-tailed or grid too large");
    if (opts.backend == PairBackend::Auto && grid &&
        (pairs <= opts.exact_pair_limit || 3.0 * fft_cost(*grid) > pairs))
      grid.reset();
  }
  if (!grid) {
    out.value = exact_sum(A, B, k, exclude_self);
    return out;
  }

  const auto mult = cic_multiplier(*grid, k);
  const auto fa = fft_forward(deposit_cic(A, *grid), grid->dim, grid->n);
  double v = &A == &B ? spectral_norm(fa, mult)
                      : spectral_pair(fa, fft_forward(deposit_cic(B, *grid), grid->dim, grid->n), mult);
  auto [lo, hi] = ngp_bracket(A, B, *grid, k);
  if (exclude_self) {
    const double self = static_cast<double>(A.size()) * A.atom_mass() * A.atom_mass() * k.at_origin();
    v -= self;
    lo -= self;
    hi -= self;
  }
  out.value = v;
  out.error_bound = std::max(hi - v, v - lo);
  out.binned = true;
  return out;
}

SiltContext::SiltContext(std::shared_ptr<const KernelTable> table, PairSumOptions opts)
    : table_(std::move(table)), opts_(opts) {
  if (!table_) throw ConfigurationError("SiltContext needs a kernel table");
}

const RadialKernel& SiltContext::density(double eps) const {
  if (!(eps > 0.0)) throw DomainError("eps must be > 0");
  std::lock_guard lock(mutex_);
  auto& slot = densities_[eps];
  if (!slot) slot = std::make_shared<RadialKernel>(RadialKernel::density(table_, eps));
  return *slot;
}

const RadialKernel& SiltContext::green(double lambda, double eps) const {
  if (!(eps > 0.0)) throw DomainError("eps must be > 0");
  if (!(lambda > 0.0)) throw DomainError("lambda must be > 0");
  std::lock_guard lock(mutex_);
  auto& slot = greens_[{lambda, eps}];
  if (!slot) slot = std::make_shared<RadialKernel>(RadialKernel::green(table_, lambda, eps));
  return *slot;
}

std::vector<SnapshotSums> snapshot_sums(const PathRecord& path, const std::vector<const RadialKernel*>& kernels,
                                        double T, std::size_t stride, const PairSumOptions& opts) {
  if (stride < 1) throw ConfigurationError("stride must be >= 1");
  if (!(T > 0.0) || T > path.horizon() * (1.0 + 1e-12)) throw DomainError("T must lie in (0, path horizon]");
  const std::size_t last = path.snapshot_index(T);
  if (last % stride != 0) throw DomainError("T is not on the strided snapshot grid");
  const std::size_t J = last / stride;
  for (const auto* k : kernels) {
    if (!k->finite_at_origin()) throw SingularEvaluation("SILT kernels must be finite at 0 (self pairs are included)");
    if (k->params().dim != path.dim) throw ConfigurationError("kernel and path dimensions differ");
  }
  std::vector<const ParticleCloud*> snaps;
  for (std::size_t j = 0; j <= J; ++j) snaps.push_back(&path.snapshots[j * stride]);

  Box box;
  box.dim = path.dim;
  double atoms = 0.0;
  for (const auto* s : snaps) {
    box.add(*s);
    atoms += static_cast<double>(s->size());
  }
  std::vector<SnapshotSums> out(kernels.size());
  if (box.empty || kernels.empty()) return out;

  std::optional<BinGrid> grid;
  if (opts.backend != PairBackend::Exact) {
    grid = make_grid(box, kernels, opts);
    if (opts.backend == PairBackend::Binned && !grid)
      throw ConfigurationError("binned snapshot sums infeasible: kernel heavy-tailed or grid too large");
    const double exact_cost = 0.5 * atoms * atoms * static_cast<double>(kernels.size());
    if (opts.backend == PairBackend::Auto && grid) {
      const double binned_cost =
          static_cast<double>(snaps.size()) * (fft_cost(*grid) + 2.0 * kernels.size() * grid->half());
      if (exact_cost <= opts.exact_pair_limit || binned_cost > exact_cost) grid.reset();
    }
  }

  if (grid) {
    std::vector<std::vector<double>> mult;
    for (const auto* k : kernels) mult.push_back(cic_multiplier(*grid, *k));
    std::vector<std::complex<double>> acc(grid->half(), {0.0, 0.0});
    for (std::size_t i = 0; i <= J; ++i) {
      const auto f = fft_forward(deposit_cic(*snaps[i], *grid), grid->dim, grid->n);
      for (std::size_t q = 0; q < kernels.size(); ++q) {
        if (i < J) {
          out[q].same += spectral_norm(f, mult[q]);
          out[q].cross += spectral_pair(acc, f, mult[q]);
        } else {
          out[q].terminal = spectral_pair(acc, f, mult[q]);
        }
      }
      for (std::size_t c = 0; c < acc.size(); ++c) acc[c] += f[c];
    }
    return out;
  }

  const int d = path.dim;
  const std::size_t nk = kernels.size();
  const MultiLookup look(kernels, box.diagonal());
  std::vector<double> acc(nk);
  for (std::size_t j = 0; j < J; ++j) {
    for (std::size_t i = j; i <= J; ++i) {
      const ParticleCloud& A = *snaps[j];
      const ParticleCloud& B = *snaps[i];
      std::fill(acc.begin(), acc.end(), 0.0);
      const bool same = i == j;
      for (std::size_t a = 0; a < A.size(); ++a) {
        const auto x = A.point(a);
        for (std::size_t b = same ? a + 1 : 0; b < B.size(); ++b) {
          const auto y = B.point(b);
          double r2 = 0.0;
          for (int c = 0; c < d; ++c) r2 += (x[c] - y[c]) * (x[c] - y[c]);
          look.accumulate(r2, acc.data());
        }
      }
      const double scale = A.atom_mass() * B.atom_mass();
      for (std::size_t q = 0; q < nk; ++q) {
        if (same) {
          out[q].same += scale * (2.0 * acc[q] + static_cast<double>(A.size()) * kernels[q]->at_origin());
        } else if (i < J) {
          out[q].cross += scale * acc[q];
        } else {
          out[q].terminal += scale * acc[q];
        }
      }
    }
  }
  return out;
}

namespace {

double step_of(const PathRecord& path, std::size_t stride) { return path.dt * static_cast<double>(stride); }

TanakaTerms assemble(const SnapshotSums& p, const SnapshotSums& g, double eps, double lambda, double h) {
  TanakaTerms t;
  t.eps = eps;
  t.lambda = lambda;
  t.dt = h;
  const double e = std::exp(lambda * eps);
  t.gamma = h * h * (p.cross + 0.5 * p.same);
  t.T1 = lambda * e * h * h * (g.cross + 0.5 * g.same);
  t.T2 = -e * h * g.terminal;
  t.T3 = e * h * g.same;
  t.T4 = e * h * (g.terminal - g.same - h * (lambda * (g.cross + g.same) - std::exp(-lambda * eps) * (p.cross + p.same)));
  t.gamma_tilde = t.gamma - t.T3;
  return t;
}

}  // namespace

double TanakaTerms::relative_gap() const { return std::abs(gamma - reconstructed()) / gamma; }

double approx_silt(const PathRecord& path, const SiltContext& ctx, double eps, double T) {
  if (!(eps > 0.0)) throw DomainError("eps must be > 0");
  const auto s = snapshot_sums(path, {&ctx.density(eps)}, T, 1, ctx.options());
  const double h = step_of(path, 1);
  return h * h * (s[0].cross + 0.5 * s[0].same);
}

double renormalized_silt(const PathRecord& path, const SiltContext& ctx, double eps, double lambda, double T) {
  if (!(eps > 0.0)) throw DomainError("eps must be > 0");
  if (!(lambda > 0.0)) throw DomainError("lambda must be > 0");
  const auto s = snapshot_sums(path, {&ctx.density(eps), &ctx.green(lambda, eps)}, T, 1, ctx.options());
  return assemble(s[0], s[1], eps, lambda, step_of(path, 1)).gamma_tilde;
}

TanakaTerms tanaka_terms(const PathRecord& path, const SiltContext& ctx, double eps, double lambda, double T,
                         std::size_t stride) {
  if (!(eps > 0.0)) throw DomainError("eps must be > 0");
  if (!(lambda > 0.0)) throw DomainError("lambda must be > 0");
  const auto s = snapshot_sums(path, {&ctx.density(eps), &ctx.green(lambda, eps)}, T, stride, ctx.options());
  return assemble(s[0], s[1], eps, lambda, step_of(path, stride));
}

SiltSeries silt_series(const PathRecord& path, const SiltContext& ctx, const std::vector<double>& eps_list,
                       double lambda, double T, const std::string& path_id, std::size_t stride) {
  if (!(lambda > 0.0)) throw DomainError("lambda must be > 0");
  std::vector<const RadialKernel*> kernels;
  for (double eps : eps_list) {
    kernels.push_back(&ctx.density(eps));
    kernels.push_back(&ctx.green(lambda, eps));
  }
  const auto s = snapshot_sums(path, kernels, T, stride, ctx.options());
  SiltSeries out;
  out.path_id = path_id;
  out.lambda = lambda;
  for (std::size_t i = 0; i < eps_list.size(); ++i)
    out.rows.push_back(assemble(s[2 * i], s[2 * i + 1], eps_list[i], lambda, step_of(path, stride)));
  return out;
}

}  // namespace siltlab
