#pragma once

// Run orchestration: dispatch a config to its suite, write CSVs and the
// manifest, report assertions.

#include <filesystem>
#include <iosfwd>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "siltlab/estimate_table.hpp"
#include "siltlab/experiment_config.hpp"
#include "siltlab/grid_function.hpp"

namespace siltlab {

struct Assertion {
  std::string name;
  bool pass = false;
  std::string detail;
};

struct HarnessOptions {
  int workers = 1;
  std::optional<std::filesystem::path> dump_paths;
  std::ostream* log = nullptr;  ///< progress messages; nullptr for silence
};

struct SuiteResult {
  EstimateTable estimates;
  std::vector<SiltSeries> series;
  /// Extra CSV files (file name, contents) such as the convergence table.
  std::vector<std::pair<std::string, std::string>> files;
  std::vector<Assertion> assertions;
  bool passed() const;
};

/// Runs the suite of cfg.kind in memory.
SuiteResult run_suite(const ExperimentConfig& cfg, const HarnessOptions& opts = {});

/// run_suite plus files in cfg.out_dir: estimates.csv, the kind's extra CSVs and
/// manifest.json. Returns 0 iff every assertion passed.
int run_experiment(const ExperimentConfig& cfg, const HarnessOptions& opts = {});

struct ConvergenceRow {
  double eps = 0.0;
  int paths = 0;
  double gamma_median = 0.0, gamma_iqr = 0.0, gamma_diff = 0.0;
  double gamma_tilde_median = 0.0, gamma_tilde_iqr = 0.0, gamma_tilde_diff = 0.0;
};

/// Per-eps median and interquartile range of gamma and gamma~ over paths, and
/// the median over paths of |value(eps_i) - value(eps_{i+1})| (NaN for the
/// last eps). Needs >= 2 eps and >= 10 paths sharing one eps list.
std::vector<ConvergenceRow> convergence_rows(const std::vector<SiltSeries>& series);
std::string emit_convergence_table(const std::vector<SiltSeries>& series);

/// True when every entry is strictly smaller than the previous one.
bool strictly_decreasing(const std::vector<double>& v);

double median(std::vector<double> v);

/// Discretized E[gamma_eps(T)] = Delta^2 [sum_{j<i<J} M(t_i, t_j) + (1/2) sum_{j<J} M(t_j, t_j)]
/// with M the kernel cross moment of p_eps, on the snapshot grid of step dt.
double silt_mean_oracle(const GridFunction& h, std::shared_ptr<const KernelTable> table, const MechanismParams& p, double eps,
                        double T, double dt);

/// Help text naming every experiment kind.
std::string kinds_help();

}  // namespace siltlab
