#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "siltlab/errors.hpp"
#include "siltlab/estimate_table.hpp"
#include "siltlab/experiment_config.hpp"
#include "siltlab/experiment_harness.hpp"
#include "siltlab/manifest.hpp"

using namespace siltlab;
namespace fs = std::filesystem;
using nlohmann::json;
using namespace nlohmann::literals;

namespace {

std::string slurp(const fs::path& f) {
  std::ifstream is(f, std::ios::binary);
  std::ostringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

fs::path scratch(const std::string& name) {
  const fs::path d = fs::temp_directory_path() / ("siltlab_unit_" + name);
  fs::remove_all(d);
  return d;
}

std::string config_error(const json& doc) {
  try {
    parse_config(doc);
  } catch (const ConfigurationError& e) {
    return e.what();
  }
  return "";
}

// one path whose gamma and gamma~ are given per eps
SiltSeries series(const std::string& id, const std::vector<double>& eps, const std::vector<double>& g,
                  const std::vector<double>& gt) {
  SiltSeries s;
  s.path_id = id;
  s.lambda = 1.0;
  for (std::size_t i = 0; i < eps.size(); ++i) {
    TanakaTerms t;
    t.eps = eps[i];
    t.lambda = 1.0;
    t.gamma = g[i];
    t.gamma_tilde = gt[i];
    s.rows.push_back(t);
  }
  return s;
}

}  // namespace

TEST(Config, SeedIsMandatory) {
  const std::string msg = config_error(R"({"schema": "siltlab.config/1", "kind": "silt"})"_json);
  EXPECT_NE(msg.find("'seed'"), std::string::npos) << msg;
  EXPECT_NE(config_error(R"({"schema": "siltlab.config/1", "kind": "silt", "seed": -3})"_json).find("'seed'"), std::string::npos);
}

TEST(Config, UnknownKindAndFieldErrors) {
  EXPECT_THROW(parse_config(R"({"schema": "siltlab.config/1", "kind": "bogus", "seed": 1})"_json), ConfigurationError);
  EXPECT_NE(config_error(R"({"schema": "siltlab.config/1", "seed": 1})"_json).find("'kind'"), std::string::npos);
  const std::string k = config_error(R"({"schema": "siltlab.config/1", "kind": "silt", "seed": 1, "params": {"K": "huge"}})"_json);
  EXPECT_NE(k.find("params.K"), std::string::npos) << k;
  const std::string a = config_error(R"({"schema": "siltlab.config/1", "kind": "silt", "seed": 1, "params": {"alpha": "two"}})"_json);
  EXPECT_NE(a.find("params.alpha"), std::string::npos) << a;
  const std::string e = config_error(R"({"schema": "siltlab.config/1", "kind": "silt", "seed": 1, "eps": [0.1]})"_json);
  EXPECT_NE(e.find("'eps'"), std::string::npos) << e;
  EXPECT_THROW(parse_config(R"({"schema": "other/2", "kind": "silt", "seed": 1})"_json), ConfigurationError);
  EXPECT_NE(config_error(R"({"kind": "silt", "seed": 1})"_json).find("'schema'"), std::string::npos);
}

TEST(Config, DefaultsValidateForEveryKind) {
  for (auto k : all_kinds()) {
    EXPECT_NO_THROW(default_config(k).validate()) << to_string(k);
    EXPECT_EQ(parse_kind(to_string(k)), k);
  }
}

TEST(Config, JsonRoundTrip) {
  for (auto k : all_kinds()) {
    ExperimentConfig c = default_config(k);
    c.run.seed = 12345678901ULL;
    const json doc = to_json(c);
    const ExperimentConfig back = parse_config(doc);
    EXPECT_EQ(to_json(back), doc) << to_string(k);
  }
  const json doc = to_json(default_config(ExperimentKind::Jumps));
  EXPECT_EQ(doc["params"]["K"], "inf");
  EXPECT_TRUE(std::isinf(parse_config(doc).run.params.K));
}

TEST(Config, OverridesKeepOtherDefaults) {
  const auto c = parse_config(R"({"schema": "siltlab.config/1", "kind": "tanaka", "seed": 9, "run": {"n": 77}})"_json);
  EXPECT_EQ(c.run.seed, 9u);
  EXPECT_EQ(c.run.n, 77);
  EXPECT_EQ(c.run.dt, default_config(ExperimentKind::Tanaka).run.dt);
}

TEST(Numbers, FormatRoundTrip) {
  for (double v : {0.1, 1.0 / 3.0, 1e-300, 6.02214076e23, -2.5, 0.0}) EXPECT_EQ(std::stod(format_number(v)), v);
  EXPECT_EQ(format_number(0.5), "0.5");
}

TEST(Estimates, SummaryAndCsv) {
  const auto row = summarize("m", "a=1", {1.0, 2.0, 3.0, 4.0}, 2.0);
  EXPECT_DOUBLE_EQ(row.value, 2.5);
  // sample sd sqrt(5/3) over sqrt(4)
  EXPECT_NEAR(row.std_error, std::sqrt(5.0 / 3.0) / 2.0, 1e-15);
  EXPECT_NEAR(row.z(), 0.5 / row.std_error, 1e-12);
  EXPECT_TRUE(std::isnan(summarize("x", "", {1.0, 2.0}).z()));
  EstimateTable t;
  t.add(row);
  const std::string csv = t.csv();
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "quantity,params,value,std_error,replicates,oracle,z");
  EXPECT_NE(csv.find("m,a=1,2.5,"), std::string::npos) << csv;
}

TEST(Convergence, MedianIqrAndDiffs) {
  const std::vector<double> eps{0.2, 0.1};
  std::vector<SiltSeries> all;
  for (int i = 0; i < 11; ++i) all.push_back(series("p" + std::to_string(i), eps, {double(i), i + 0.5 * i}, {1.0, 1.0 + i}));
  const auto rows = convergence_rows(all);
  ASSERT_EQ(rows.size(), 2u);
  EXPECT_EQ(rows[0].paths, 11);
  EXPECT_DOUBLE_EQ(rows[0].gamma_median, 5.0);
  EXPECT_DOUBLE_EQ(rows[1].gamma_median, 7.5);
  // |diff| per path is i/2, median 2.5
  EXPECT_DOUBLE_EQ(rows[0].gamma_diff, 2.5);
  EXPECT_DOUBLE_EQ(rows[0].gamma_tilde_diff, 5.0);
  EXPECT_TRUE(std::isnan(rows[1].gamma_diff));
  EXPECT_DOUBLE_EQ(rows[0].gamma_tilde_iqr, 0.0);
  EXPECT_GT(rows[0].gamma_iqr, 0.0);
  const std::string csv = emit_convergence_table(all);
  EXPECT_EQ(csv.substr(0, csv.find('\n')),
            "eps,paths,gamma_median,gamma_iqr,gamma_median_diff,gamma_tilde_median,gamma_tilde_iqr,gamma_tilde_median_diff");
}

TEST(Convergence, RejectsThinInput) {
  std::vector<SiltSeries> few;
  for (int i = 0; i < 9; ++i) few.push_back(series("p", {0.2, 0.1}, {1, 1}, {1, 1}));
  EXPECT_THROW(convergence_rows(few), DomainError);
  std::vector<SiltSeries> one_eps;
  for (int i = 0; i < 12; ++i) one_eps.push_back(series("p", {0.2}, {1}, {1}));
  EXPECT_THROW(convergence_rows(one_eps), DomainError);
}

TEST(Convergence, Helpers) {
  EXPECT_TRUE(strictly_decreasing({3.0, 2.0, 1.0}));
  EXPECT_FALSE(strictly_decreasing({3.0, 3.0, 1.0}));
  EXPECT_FALSE(strictly_decreasing({1.0, 2.0}));
  EXPECT_DOUBLE_EQ(median({5.0, 1.0, 3.0}), 3.0);
  EXPECT_DOUBLE_EQ(median({4.0, 1.0, 3.0, 2.0}), 2.5);
}

TEST(Manifest, Sha256) {
  const fs::path dir = scratch("sha");
  fs::create_directories(dir);
  std::ofstream(dir / "abc.txt", std::ios::binary) << "abc";
  EXPECT_EQ(sha256_file(dir / "abc.txt"), "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
  EXPECT_THROW(sha256_file(dir / "missing"), ConfigurationError);
  fs::remove_all(dir);
}

TEST(Harness, RegimeRunWritesManifest) {
  ExperimentConfig c = default_config(ExperimentKind::Regime);
  c.out_dir = scratch("regime");
  ASSERT_EQ(run_experiment(c), 0);
  const std::string csv = slurp(c.out_dir / "regime.csv");
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "alpha,dim,beta,verdict,upper_threshold,lower_threshold,expected");
  EXPECT_NE(csv.find("1.8,4,0.9,RENORMALIZED_SILT"), std::string::npos) << csv;
  EXPECT_NE(csv.find("1.8,5,0.9,NONE"), std::string::npos) << csv;

  const json m = json::parse(slurp(c.out_dir / "manifest.json"));
  EXPECT_EQ(m["schema"], "siltlab.manifest/1");
  EXPECT_EQ(m["status"], "passed");
  EXPECT_EQ(m["config"], to_json(c));
  std::vector<std::string> names;
  for (const auto& o : m["outputs"]) {
    names.push_back(o["file"]);
    EXPECT_EQ(o["sha256"], sha256_file(c.out_dir / o["file"].get<std::string>()));
  }
  EXPECT_NE(std::find(names.begin(), names.end(), "estimates.csv"), names.end());
  EXPECT_NE(std::find(names.begin(), names.end(), "regime.csv"), names.end());
  fs::remove_all(c.out_dir);
}

TEST(Harness, FailedAssertionGivesNonzeroStatus) {
  ExperimentConfig c = default_config(ExperimentKind::Regime);
  c.regime_cases = {{2.0, 3, 0.5, "NONE"}};
  c.out_dir = scratch("regime_fail");
  EXPECT_NE(run_experiment(c), 0);
  EXPECT_EQ(json::parse(slurp(c.out_dir / "manifest.json"))["status"], "failed");
  fs::remove_all(c.out_dir);
}

TEST(Harness, SiltRunIsDeterministic) {
  ExperimentConfig c = default_config(ExperimentKind::Silt);
  c.run.n = 60;
  c.run.replicates = 10;
  c.run.dt = 1.0 / 16.0;
  c.eps = {0.4, 0.2};
  c.silt_oracle = false;
  const fs::path a = scratch("silt_a"), b = scratch("silt_b");
  c.out_dir = a;
  run_experiment(c);
  c.out_dir = b;
  HarnessOptions two;
  two.workers = 2;
  run_experiment(c, two);
  for (const char* f : {"estimates.csv", "silt_series.csv", "convergence.csv"}) {
    ASSERT_TRUE(fs::exists(a / f)) << f;
    EXPECT_EQ(slurp(a / f), slurp(b / f)) << f;
  }
  const json ma = json::parse(slurp(a / "manifest.json"));
  EXPECT_EQ(ma["seeds"].size(), 10u);
  fs::remove_all(a);
  fs::remove_all(b);
}

TEST(Harness, HelpNamesEveryKind) {
  const std::string h = kinds_help();
  for (auto k : all_kinds()) EXPECT_NE(h.find(to_string(k)), std::string::npos) << to_string(k);
}
