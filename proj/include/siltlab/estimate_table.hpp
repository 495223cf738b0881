#pragma once

// Labeled scalar statistics (value, standard error, replicate count, oracle)
// and their CSV form.

#include <cmath>
#include <filesystem>
#include <limits>
#include <string>
#include <vector>

#include "siltlab/silt_estimator.hpp"

namespace siltlab {

struct EstimateRow {
  std::string quantity;
  std::string params;  ///< "key=value;..." description of the setting
  double value = 0.0;
  double std_error = 0.0;
  int replicates = 0;
  double oracle = std::numeric_limits<double>::quiet_NaN();

  bool has_oracle() const { return !std::isnan(oracle); }
  /// (value - oracle) / std_error; NaN without oracle or error.
  double z() const;
};

/// Mean and standard error of a sample.
EstimateRow summarize(std::string quantity, std::string params, const std::vector<double>& sample,
                      double oracle = std::numeric_limits<double>::quiet_NaN());

class EstimateTable {
 public:
  void add(EstimateRow row) { rows_.push_back(std::move(row)); }
  const std::vector<EstimateRow>& rows() const { return rows_; }

  /// quantity,params,value,std_error,replicates,oracle,z
  std::string csv() const;
  void write_csv(const std::filesystem::path& file) const;

 private:
  std::vector<EstimateRow> rows_;
};

/// path_id,eps,lambda,gamma,gamma_tilde,T1,T2,T3,T4
std::string silt_series_csv(const std::vector<SiltSeries>& series);

/// Shortest decimal form that reads back to the same double.
std::string format_number(double v);

void write_text(const std::filesystem::path& file, const std::string& text);

}  // namespace siltlab
