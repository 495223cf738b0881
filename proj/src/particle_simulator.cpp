#include "siltlab/particle_simulator.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <numbers>
#include <sstream>
#include <thread>

#include <boost/math/special_functions/gamma.hpp>

#include "siltlab/errors.hpp"

namespace siltlab {

void InitialDensity::validate() const {
  if (dim < 1) throw ConfigurationError("initial density: dim must be >= 1");
  if (!h) throw ConfigurationError("initial density: no function given");
  if (!(half_width > 0.0) || !std::isfinite(half_width))
    throw ConfigurationError("initial density: support box must be bounded");
  if (!(sup > 0.0) || !std::isfinite(sup)) throw ConfigurationError("initial density: h must be bounded");
  if (!(mass >= 0.0) || !std::isfinite(mass)) throw ConfigurationError("initial density: mass must be finite");
}

InitialDensity InitialDensity::uniform(int dim, double lo, double hi, double mass) {
  if (!(hi > lo)) throw ConfigurationError("uniform density needs hi > lo");
  InitialDensity d;
  d.dim = dim;
  const double value = mass / std::pow(hi - lo, dim);
  d.h = [=](std::span<const double> x) {
    for (double xi : x)
      if (xi < lo || xi > hi) return 0.0;
    return value;
  };
  d.half_width = std::max(std::abs(lo), std::abs(hi));
  d.sup = value;
  d.mass = mass;
  return d;
}

InitialDensity InitialDensity::gaussian(int dim, double sigma, double mass, double cutoff) {
  if (!(sigma > 0.0) || !(cutoff > 0.0)) throw ConfigurationError("gaussian density needs sigma, cutoff > 0");
  InitialDensity d;
  d.dim = dim;
  const double inside = boost::math::gamma_p(0.5 * dim, 0.5 * cutoff * cutoff);
  const double peak = mass / (std::pow(2.0 * std::numbers::pi * sigma * sigma, 0.5 * dim) * inside);
  const double r2max = cutoff * cutoff * sigma * sigma;
  d.h = [=](std::span<const double> x) {
    double r2 = 0.0;
    for (double xi : x) r2 += xi * xi;
    return r2 > r2max ? 0.0 : peak * std::exp(-0.5 * r2 / (sigma * sigma));
  };
  d.half_width = cutoff * sigma;
  d.sup = peak;
  d.mass = mass;
  return d;
}

double ParticleCloud::integrate(const std::function<double(std::span<const double>)>& phi) const {
  double s = 0.0;
  for (std::size_t i = 0; i < size(); ++i) s += phi(point(i));
  return s / n_;
}

ParticleCloud init_cloud(const InitialDensity& h, double n, Rng& rng) {
  h.validate();
  if (!(n >= 1.0)) throw ConfigurationError("n must be >= 1");
  const auto count = static_cast<std::size_t>(std::floor(n * h.mass + 1e-9));
  ParticleCloud cloud(h.dim, n, 0.0);
  cloud.positions().reserve(count * h.dim);
  std::uniform_real_distribution<double> box(-h.half_width, h.half_width);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::array<double, 3> x{};
  const std::span<double> xs(x.data(), h.dim);
  const std::size_t max_tries = 1000 * (count + 1) + 1'000'000;
  std::size_t tries = 0;
  while (cloud.size() < count) {
    if (++tries > max_tries) throw ConfigurationError("initial density: rejection sampler is not accepting");
    for (double& xi : xs) xi = box(rng);
    const double v = h.h(xs);
    if (v > h.sup * (1.0 + 1e-12)) throw ConfigurationError("initial density exceeds its declared bound");
    if (unit(rng) * h.sup < v) cloud.push(xs);
  }
  return cloud;
}

std::size_t PathRecord::snapshot_index(double t) const {
  for (std::size_t j = 0; j < times.size(); ++j)
    if (std::abs(times[j] - t) <= 1e-9 * std::max(1.0, std::abs(t))) return j;
  throw DomainError("no snapshot at the requested time");
}

std::uint64_t PathRecord::max_offspring(double t) const {
  std::uint64_t m = 0;
  for (const auto& e : events) {
    if (e.time > t) break;
    m = std::max(m, e.offspring);
  }
  return m;
}

bool PathRecord::mass_bookkeeping_ok() const {
  if (!events_recorded) return false;
  std::size_t e = 0;
  for (std::size_t j = 1; j < snapshots.size(); ++j) {
    long long delta = 0;
    while (e < events.size() && events[e].time < times[j]) {
      delta += static_cast<long long>(events[e].offspring) - 1;
      ++e;
    }
    const long long change =
        static_cast<long long>(snapshots[j].size()) - static_cast<long long>(snapshots[j - 1].size());
    if (change != delta) return false;
  }
  return e == events.size();
}

void RunConfig::validate() const {
  params.validate();
  if (!(n >= 1.0)) throw ConfigurationError("n must be >= 1");
  if (!(dt > 0.0)) throw ConfigurationError("snapshot interval must be > 0");
  if (!(T >= dt)) throw ConfigurationError("T must be >= the snapshot interval");
  if (replicates < 1) throw ConfigurationError("replicates must be >= 1");
  const double steps = T / dt;
  if (std::abs(steps - std::round(steps)) > 1e-9 * steps)
    throw ConfigurationError("T must be a whole number of snapshot intervals");
}

std::size_t RunConfig::steps() const { return static_cast<std::size_t>(std::llround(T / dt)); }

namespace {

std::uint64_t splitmix(std::uint64_t z) {
  z += 0x9E3779B97F4A7C15ull;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

}  // namespace

// Hashing the master seed first keeps the replicate streams of seeds s and s+1 disjoint.
std::uint64_t replicate_seed(std::uint64_t master, std::uint64_t index) {
  return splitmix(splitmix(master) + index * 0x9E3779B97F4A7C15ull);
}

PathRecord simulate_path(const RunConfig& cfg, const OffspringLaw& law, ParticleCloud initial, Rng& rng) {
  cfg.validate();
  const int d = initial.dim();
  if (d != cfg.params.dim) throw ConfigurationError("initial cloud dimension differs from params.dim");
  const KernelParams motion = cfg.params.kernel();
  const std::size_t J = cfg.steps();

  PathRecord rec;
  rec.dim = d;
  rec.n = cfg.n;
  rec.dt = cfg.dt;
  rec.events_recorded = cfg.record_events;
  rec.times.reserve(J + 1);
  rec.snapshots.reserve(J + 1);

  std::vector<double> pos = std::move(initial.positions());
  std::vector<double> last(pos.size() / d, 0.0);
  rec.times.push_back(0.0);
  {
    ParticleCloud c(d, cfg.n, 0.0);
    c.positions() = pos;
    rec.snapshots.push_back(std::move(c));
  }

  const double rate = cfg.freeze_branching ? 0.0 : law.branch_rate();
  std::exponential_distribution<double> expo(1.0);
  std::array<double, 3> inc{};
  auto move = [&](std::size_t i, double t) {
    if (cfg.freeze_motion || t <= last[i]) return;
    sample_stable_increment(motion, t - last[i], rng, std::span<double>(inc.data(), d));
    for (int a = 0; a < d; ++a) pos[i * d + a] += inc[a];
    last[i] = t;
  };

  double t = 0.0;
  for (std::size_t j = 1; j <= J; ++j) {
    const double target = (j == J) ? cfg.T : static_cast<double>(j) * cfg.dt;
    while (true) {
      const std::size_t count = last.size();
      if (count == 0 || rate == 0.0) break;
      const double wait = expo(rng) / (rate * static_cast<double>(count));
      if (t + wait >= target) break;
      t += wait;
      const std::size_t i = std::uniform_int_distribution<std::size_t>(0, count - 1)(rng);
      move(i, t);
      const std::uint64_t L = law.sample(rng);
      if (cfg.record_events) {
        BranchEvent ev;
        ev.time = t;
        ev.offspring = L;
        for (int a = 0; a < d; ++a) ev.position[a] = pos[i * d + a];
        rec.events.push_back(ev);
      }
      if (L == 0) {
        const std::size_t back = count - 1;
        for (int a = 0; a < d; ++a) pos[i * d + a] = pos[back * d + a];
        last[i] = last[back];
        pos.resize(back * d);
        last.pop_back();
      } else if (L > 1) {
        if (L - 1 > cfg.population_cap || count + (L - 1) > cfg.population_cap) {
          std::ostringstream msg;
          msg << "population cap " << cfg.population_cap << " exceeded at t=" << t << " (" << count
              << " particles, offspring burst " << L << ")";
          throw PopulationExplosion(msg.str());
        }
        pos.reserve(pos.size() + (L - 1) * d);
        for (std::uint64_t c = 1; c < L; ++c) {
          for (int a = 0; a < d; ++a) pos.push_back(pos[i * d + a]);
          last.push_back(t);
        }
      }
    }
    t = target;
    for (std::size_t i = 0; i < last.size(); ++i) move(i, t);
    ParticleCloud c(d, cfg.n, t);
    c.positions() = pos;
    rec.times.push_back(t);
    rec.snapshots.push_back(std::move(c));
  }
  return rec;
}

PathRecord simulate_path(const RunConfig& cfg, const OffspringLaw& law, const InitialDensity& h, Rng& rng) {
  if (h.dim != cfg.params.dim) throw ConfigurationError("initial density dimension differs from params.dim");
  return simulate_path(cfg, law, init_cloud(h, cfg.n, rng), rng);
}

namespace {

void parallel_for(int count, int workers, const std::function<void(int)>& body) {
  workers = std::max(1, std::min(workers, count));
  if (workers == 1) {
    for (int i = 0; i < count; ++i) body(i);
    return;
  }
  std::atomic<int> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  std::vector<std::thread> pool;
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (int i = next++; i < count; i = next++) {
        try {
          body(i);
        } catch (...) {
          std::lock_guard lock(failure_mutex);
          if (!failure) failure = std::current_exception();
          next = count;
        }
      }
    });
  }
  for (auto& th : pool) th.join();
  if (failure) std::rethrow_exception(failure);
}

}  // namespace

std::vector<std::vector<double>> run_replicates(const RunConfig& cfg, const InitialDensity& h,
                                                const PathStatistic& stat, int workers) {
  cfg.validate();
  const OffspringLaw law = OffspringLaw::build(cfg.params, cfg.n);
  std::vector<std::vector<double>> out(cfg.replicates);
  parallel_for(cfg.replicates, workers, [&](int i) {
    Rng rng(replicate_seed(cfg.seed, static_cast<std::uint64_t>(i)));
    out[i] = stat(simulate_path(cfg, law, h, rng), i);
  });
  return out;
}

MomentEstimate mc_moment(const RunConfig& cfg, const InitialDensity& h,
                         const std::function<double(std::span<const double>)>& phi, double t, int order,
                         double oracle, int workers) {
  if (order != 1 && order != 2) throw DomainError("mc_moment supports order 1 and 2");
  if (order == 2 && !cfg.params.truncated()) throw DomainError("second moment infinite for untruncated beta < 1 process");
  RunConfig run = cfg;
  run.record_events = false;
  const auto vals = run_replicates(run, h, [&](const PathRecord& p, int) {
    const double y = p.snapshots[p.snapshot_index(t)].integrate(phi);
    return std::vector<double>{order == 1 ? y : y * y};
  }, workers);
  MomentEstimate est;
  est.replicates = static_cast<int>(vals.size());
  est.oracle = oracle;
  double s = 0.0, s2 = 0.0;
  for (const auto& v : vals) s += v[0];
  est.mean = s / est.replicates;
  for (const auto& v : vals) s2 += (v[0] - est.mean) * (v[0] - est.mean);
  est.std_error = est.replicates > 1 ? std::sqrt(s2 / (est.replicates - 1) / est.replicates) : 0.0;
  return est;
}

std::vector<Exceedance> jump_exceedance(const RunConfig& cfg, const InitialDensity& h, const std::vector<double>& Ks,
                                        double T, int workers) {
  if (cfg.params.truncated()) throw DomainError("jump_exceedance needs an untruncated (K = infinity) run");
  RunConfig run = cfg;
  run.T = T;
  run.dt = T;
  run.record_events = true;
  run.freeze_motion = true;
  run.validate();
  const OffspringLaw law = OffspringLaw::build(run.params, run.n);
  std::vector<double> largest(run.replicates, 0.0);
  parallel_for(run.replicates, workers, [&](int i) {
    Rng rng(replicate_seed(run.seed, static_cast<std::uint64_t>(i)));
    try {
      const PathRecord p = simulate_path(run, law, h, rng);
      largest[i] = static_cast<double>(p.max_offspring(T)) / run.n;
    } catch (const PopulationExplosion&) {
      largest[i] = static_cast<double>(run.population_cap) / run.n;
    }
  });
  std::vector<Exceedance> out;
  for (double K : Ks) {
    Exceedance e;
    e.K = K;
    e.paths = run.replicates;
    for (double m : largest) e.hits += (m > K) ? 1 : 0;
    e.frequency = static_cast<double>(e.hits) / e.paths;
    e.std_error = std::sqrt(e.frequency * (1.0 - e.frequency) / e.paths);
    out.push_back(e);
  }
  return out;
}

}  // namespace siltlab
