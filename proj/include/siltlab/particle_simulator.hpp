#pragma once

// Branching alpha-stable particle system approximating Y^K (X when K is
// infinite): n particles per unit mass, branching in place with the
// exact-generator offspring law, exact stable motion between events.

#include <array>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "siltlab/branching_mechanism.hpp"
#include "siltlab/stable_kernels.hpp"

namespace siltlab {

/// Bounded initial density h on a box [-half_width, half_width]^d, sampled by
/// rejection against `sup`.
struct InitialDensity {
  int dim = 1;
  std::function<double(std::span<const double>)> h;
  double half_width = 1.0;
  double sup = 1.0;
  double mass = 1.0;  ///< mu(1) = int h

  void validate() const;

  /// mass times the uniform density on [lo, hi]^d.
  static InitialDensity uniform(int dim, double lo, double hi, double mass = 1.0);
  /// mass times a centered isotropic Gaussian of standard deviation sigma,
  /// cut at radius `cutoff` sigma and renormalized.
  static InitialDensity gaussian(int dim, double sigma, double mass = 1.0, double cutoff = 6.0);
};

class ParticleCloud {
 public:
  ParticleCloud() = default;
  ParticleCloud(int dim, double n, double time = 0.0) : dim_(dim), n_(n), time_(time) {}

  int dim() const { return dim_; }
  double atom_mass() const { return 1.0 / n_; }
  double particles_per_mass() const { return n_; }
  double time() const { return time_; }
  void set_time(double t) { time_ = t; }
  std::size_t size() const { return dim_ > 0 ? positions_.size() / static_cast<std::size_t>(dim_) : 0; }
  double total_mass() const { return static_cast<double>(size()) / n_; }

  std::span<const double> point(std::size_t i) const { return {positions_.data() + i * dim_, static_cast<std::size_t>(dim_)}; }
  std::span<double> point(std::size_t i) { return {positions_.data() + i * dim_, static_cast<std::size_t>(dim_)}; }
  const std::vector<double>& positions() const { return positions_; }
  std::vector<double>& positions() { return positions_; }

  void push(std::span<const double> x) { positions_.insert(positions_.end(), x.begin(), x.end()); }

  /// Y(phi) = (1/n) sum phi(x_a).
  double integrate(const std::function<double(std::span<const double>)>& phi) const;

 private:
  int dim_ = 1;
  double n_ = 1.0;
  double time_ = 0.0;
  std::vector<double> positions_;
};

/// floor(n mu(1)) particles iid with density h / mu(1).
ParticleCloud init_cloud(const InitialDensity& h, double n, Rng& rng);

struct BranchEvent {
  double time = 0.0;
  std::array<double, 3> position{0.0, 0.0, 0.0};
  std::uint64_t offspring = 0;
};

struct PathRecord {
  int dim = 1;
  double n = 1.0;
  double dt = 0.0;
  std::vector<double> times;
  std::vector<ParticleCloud> snapshots;
  std::vector<BranchEvent> events;
  bool events_recorded = true;

  double horizon() const { return times.empty() ? 0.0 : times.back(); }
  /// Index j with times[j] = t (to 1e-9 relative), or throws DomainError.
  std::size_t snapshot_index(double t) const;
  /// Largest L over events with time <= t.
  std::uint64_t max_offspring(double t) const;
  /// Snapshot count changes equal sum (L - 1) over the events in between.
  bool mass_bookkeeping_ok() const;
};

struct RunConfig {
  MechanismParams params;
  double n = 2000.0;
  double T = 1.0;
  double dt = 1.0 / 128.0;
  int replicates = 500;
  std::uint64_t seed = 1;
  std::size_t population_cap = 10'000'000;
  bool record_events = true;
  bool freeze_motion = false;     // test hook: positions never move
  bool freeze_branching = false;  // test hook: no branching events

  void validate() const;
  std::size_t steps() const;
};

/// Seed of replicate i: splitmix64 of (splitmix64(master) + i * golden), so adding
/// replicates leaves earlier streams untouched.
std::uint64_t replicate_seed(std::uint64_t master, std::uint64_t index);

PathRecord simulate_path(const RunConfig& cfg, const OffspringLaw& law, ParticleCloud initial, Rng& rng);
PathRecord simulate_path(const RunConfig& cfg, const OffspringLaw& law, const InitialDensity& h, Rng& rng);

using PathStatistic = std::function<std::vector<double>(const PathRecord&, int replicate)>;

/// Simulates cfg.replicates paths (replicate i seeded with replicate_seed(cfg.seed, i))
/// on `workers` threads and returns stat(path, i) per replicate, in replicate order.
std::vector<std::vector<double>> run_replicates(const RunConfig& cfg, const InitialDensity& h,
                                                const PathStatistic& stat, int workers = 1);

struct MomentEstimate {
  double mean = 0.0;
  double std_error = 0.0;
  int replicates = 0;
  double oracle = 0.0;
  double z() const { return std_error > 0.0 ? (mean - oracle) / std_error : 0.0; }
};

/// Replicate mean and standard error of Y_t(phi)^order, against `oracle`.
MomentEstimate mc_moment(const RunConfig& cfg, const InitialDensity& h,
                         const std::function<double(std::span<const double>)>& phi, double t, int order,
                         double oracle, int workers = 1);

struct Exceedance {
  double K = 0.0;
  double frequency = 0.0;
  double std_error = 0.0;
  int hits = 0;
  int paths = 0;
};

/// Empirical P(some event before T has L/n > K) per K, from an untruncated run.
std::vector<Exceedance> jump_exceedance(const RunConfig& cfg, const InitialDensity& h, const std::vector<double>& Ks,
                                        double T, int workers = 1);

}  // namespace siltlab
