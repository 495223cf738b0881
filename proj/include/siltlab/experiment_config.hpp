#pragma once

// JSON experiment configuration (schema "siltlab.config/1").

#include <array>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "siltlab/grid_function.hpp"
#include "siltlab/particle_simulator.hpp"

namespace siltlab {

enum class ExperimentKind { Kernels, Moments, Silt, Tanaka, Regime, Jumps };

std::string to_string(ExperimentKind k);
ExperimentKind parse_kind(const std::string& s);
const std::vector<ExperimentKind>& all_kinds();

struct RegimeCase {
  double alpha = 2.0;
  int dim = 1;
  double beta = 0.5;
  std::string expected;  ///< empty: report only
};

struct ExperimentConfig {
  static constexpr const char* kSchema = "siltlab.config/1";

  ExperimentKind kind = ExperimentKind::Kernels;
  RunConfig run;                      ///< params, n, T, dt, replicates, seed
  double initial_sigma = 0.5;         ///< Gaussian initial density h
  double initial_mass = 1.0;
  GridSpec grid{1, 6.0, 1.0 / 32.0, 8.0};

  // moments
  double t = 1.0;
  double s = 0.5;
  double phi_sigma = 1.0;
  double psi_sigma = 0.5;
  // silt / tanaka
  std::vector<double> eps{0.4, 0.2, 0.1, 0.05};
  double lambda = 1.0;
  std::vector<double> lambdas{1.0, 4.0};
  std::vector<int> strides{4, 2, 1};
  bool silt_oracle = true;
  // jumps
  std::vector<double> jump_K{1.0, 1.5, 2.2, 3.3, 4.7, 6.8, 10.0};
  // regime
  std::vector<RegimeCase> regime_cases;
  // tolerances
  double z_tolerance = 3.0;
  double slope_tolerance = 0.2;

  std::filesystem::path out_dir = "siltlab_out";

  /// Field-level checks; throws ConfigurationError naming the field.
  void validate() const;
  InitialDensity initial_density() const;
};

/// Defaults of the desk-scale profile for one kind.
ExperimentConfig default_config(ExperimentKind kind);

/// Parses a config document; missing fields keep the defaults of its kind.
/// "seed" is mandatory.
ExperimentConfig parse_config(const nlohmann::json& doc);
ExperimentConfig load_config(const std::filesystem::path& file);
nlohmann::json to_json(const ExperimentConfig& cfg);

}  // namespace siltlab
