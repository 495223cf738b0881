#include "siltlab/estimate_table.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "siltlab/errors.hpp"

namespace siltlab {

double EstimateRow::z() const {
  if (!has_oracle() || !(std_error > 0.0)) return std::numeric_limits<double>::quiet_NaN();
  return (value - oracle) / std_error;
}

EstimateRow summarize(std::string quantity, std::string params, const std::vector<double>& sample, double oracle) {
  EstimateRow row;
  row.quantity = std::move(quantity);
  row.params = std::move(params);
  row.oracle = oracle;
  row.replicates = static_cast<int>(sample.size());
  if (sample.empty()) return row;
  double s = 0.0;
  for (double v : sample) s += v;
  row.value = s / static_cast<double>(sample.size());
  if (sample.size() > 1) {
    double ss = 0.0;
    for (double v : sample) ss += (v - row.value) * (v - row.value);
    row.std_error = std::sqrt(ss / static_cast<double>(sample.size() - 1) / static_cast<double>(sample.size()));
  }
  return row;
}

std::string format_number(double v) {
  if (std::isnan(v)) return "";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

namespace {

std::string quoted(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

}  // namespace

std::string EstimateTable::csv() const {
  std::ostringstream os;
  os << "quantity,params,value,std_error,replicates,oracle,z\n";
  for (const auto& r : rows_)
    os << quoted(r.quantity) << ',' << quoted(r.params) << ',' << format_number(r.value) << ','
       << format_number(r.std_error) << ',' << r.replicates << ',' << format_number(r.oracle) << ','
       << format_number(r.z()) << '\n';
  return os.str();
}

void EstimateTable::write_csv(const std::filesystem::path& file) const { write_text(file, csv()); }

std::string silt_series_csv(const std::vector<SiltSeries>& series) {
  std::ostringstream os;
  os << "path_id,eps,lambda,gamma,gamma_tilde,T1,T2,T3,T4\n";
  for (const auto& s : series)
    for (const auto& r : s.rows)
      os << quoted(s.path_id) << ',' << format_number(r.eps) << ',' << format_number(r.lambda) << ','
         << format_number(r.gamma) << ',' << format_number(r.gamma_tilde) << ',' << format_number(r.T1) << ','
         << format_number(r.T2) << ',' << format_number(r.T3) << ',' << format_number(r.T4) << '\n';
  return os.str();
}

void write_text(const std::filesystem::path& file, const std::string& text) {
  if (file.has_parent_path()) std::filesystem::create_directories(file.parent_path());
  std::ofstream os(file, std::ios::binary);
  if (!os) throw ConfigurationError("cannot open " + file.string() + " for writing");
  os << text;
  if (!os) throw ConfigurationError("write failed: " + file.string());
}

}  // namespace siltlab
