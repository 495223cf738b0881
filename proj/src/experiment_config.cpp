#include "siltlab/experiment_config.hpp"

#include <cmath>
#include <fstream>

#include "siltlab/errors.hpp"

namespace siltlab {

using nlohmann::json;

namespace {

const std::vector<std::pair<ExperimentKind, std::string>>& kind_names() {
  static const std::vector<std::pair<ExperimentKind, std::string>> names = {
      {ExperimentKind::Kernels, "kernels"}, {ExperimentKind::Moments, "moments"}, {ExperimentKind::Silt, "silt"},
      {ExperimentKind::Tanaka, "tanaka"},   {ExperimentKind::Regime, "regime"},   {ExperimentKind::Jumps, "jumps"}};
  return names;
}

[[noreturn]] void bad(const std::string& field, const std::string& what) {
  throw ConfigurationError("config field '" + field + "': " + what);
}

const json* find(const json& obj, const std::string& key) {
  auto it = obj.find(key);
  return it == obj.end() ? nullptr : &*it;
}

void read(const json& obj, const std::string& key, const std::string& path, double& out) {
  if (const json* v = find(obj, key)) {
    if (!v->is_number()) bad(path, "expected a number");
    out = v->get<double>();
  }
}

void read(const json& obj, const std::string& key, const std::string& path, int& out) {
  if (const json* v = find(obj, key)) {
    if (!v->is_number_integer()) bad(path, "expected an integer");
    out = v->get<int>();
  }
}

void read(const json& obj, const std::string& key, const std::string& path, bool& out) {
  if (const json* v = find(obj, key)) {
    if (!v->is_boolean()) bad(path, "expected true or false");
    out = v->get<bool>();
  }
}

template <class T>
void read_list(const json& obj, const std::string& key, const std::string& path, std::vector<T>& out) {
  if (const json* v = find(obj, key)) {
    if (!v->is_array()) bad(path, "expected an array");
    out.clear();
    for (const auto& e : *v) {
      if (!e.is_number() || (std::is_integral_v<T> && !e.is_number_integer()))
        bad(path, std::is_integral_v<T> ? "expected integers" : "expected numbers");
      out.push_back(e.get<T>());
    }
  }
}

const json& section(const json& doc, const std::string& key) {
  static const json empty = json::object();
  const json* v = find(doc, key);
  if (!v) return empty;
  if (!v->is_object()) bad(key, "expected an object");
  return *v;
}

json k_to_json(double K) { return std::isinf(K) ? json("inf") : json(K); }

}  // namespace

std::string to_string(ExperimentKind k) {
  for (const auto& [kind, name] : kind_names())
    if (kind == k) return name;
  return "?";
}

ExperimentKind parse_kind(const std::string& s) {
  for (const auto& [kind, name] : kind_names())
    if (name == s) return kind;
  throw ConfigurationError("unknown experiment kind '" + s + "' (kernels, moments, silt, tanaka, regime, jumps)");
}

const std::vector<ExperimentKind>& all_kinds() {
  static const std::vector<ExperimentKind> kinds = {ExperimentKind::Kernels, ExperimentKind::Moments,
                                                    ExperimentKind::Silt,    ExperimentKind::Tanaka,
                                                    ExperimentKind::Regime,  ExperimentKind::Jumps};
  return kinds;
}

ExperimentConfig default_config(ExperimentKind kind) {
  ExperimentConfig c;
  c.kind = kind;
  c.run.seed = 1;
  c.run.T = 1.0;
  switch (kind) {
    case ExperimentKind::Kernels:
      c.run.params = {1.5, 2, 0.5, 2.0};
      c.run.replicates = 1;
      break;
    case ExperimentKind::Moments:
      c.run.params = {1.5, 1, 0.5, 2.0};
      c.run.n = 2000;
      c.run.replicates = 500;
      c.run.dt = 1.0 / 128.0;
      break;
    case ExperimentKind::Silt:
      c.run.params = {2.0, 1, 0.5, 2.0};
      c.run.n = 1000;
      c.run.replicates = 200;
      c.run.dt = 1.0 / 64.0;
      break;
    case ExperimentKind::Tanaka:
      c.run.params = {2.0, 1, 0.5, 2.0};
      c.run.n = 500;
      c.run.replicates = 50;
      c.run.dt = 1.0 / 256.0;
      c.eps = {0.2};
      break;
    case ExperimentKind::Regime:
      c.run.replicates = 1;
      c.regime_cases = {{2.0, 3, 0.5, "SILT"},
                        {1.8, 3, 0.9, ""},
                        {1.8, 4, 0.9, "RENORMALIZED_SILT"},
                        {1.8, 5, 0.9, "NONE"},
                        {1.5, 3, 0.5, "RENORMALIZED_SILT"}};
      break;
    case ExperimentKind::Jumps:
      c.run.params = {2.0, 1, 0.5, kInfiniteK};
      c.run.n = 100;
      c.run.replicates = 2000;
      c.run.dt = 1.0;
      break;
  }
  c.grid.dim = c.run.params.dim;
  return c;
}

void ExperimentConfig::validate() const {
  try {
    run.params.validate();
  } catch (const std::exception& e) {
    bad("params", e.what());
  }
  if (!(run.n >= 1.0)) bad("run.n", "must be >= 1");
  if (!(run.dt > 0.0)) bad("run.dt", "must be > 0");
  if (!(run.T >= run.dt)) bad("run.T", "must be >= run.dt");
  if (std::abs(run.T / run.dt - std::round(run.T / run.dt)) > 1e-9 * (run.T / run.dt))
    bad("run.T", "must be a whole number of snapshot intervals run.dt");
  if (run.replicates < 1) bad("run.replicates", "must be >= 1");
  if (run.population_cap < 1) bad("run.population_cap", "must be >= 1");
  if (!(initial_sigma > 0.0)) bad("initial.sigma", "must be > 0");
  if (!(initial_mass > 0.0)) bad("initial.mass", "must be > 0");
  if (grid.dim != run.params.dim) bad("grid", "dimension must equal params.dim");
  try {
    grid.validate();
  } catch (const std::exception& e) {
    bad("grid", e.what());
  }
  if (!(z_tolerance > 0.0)) bad("tolerances.z", "must be > 0");
  if (!(slope_tolerance > 0.0)) bad("tolerances.slope", "must be > 0");
  for (double e : eps)
    if (!(e > 0.0)) bad("eps", "every eps must be > 0");
  if (!(lambda > 0.0)) bad("lambda", "must be > 0");
  for (double l : lambdas)
    if (!(l > 0.0)) bad("lambdas", "every lambda must be > 0");
  switch (kind) {
    case ExperimentKind::Moments:
      if (!(s > 0.0) || !(t >= s)) bad("moments", "need t >= s > 0");
      if (!run.params.truncated()) bad("params.K", "moments need K < inf");
      if (!(phi_sigma > 0.0) || !(psi_sigma > 0.0)) bad("moments", "phi_sigma and psi_sigma must be > 0");
      break;
    case ExperimentKind::Silt:
      if (eps.size() < 2) bad("eps", "the convergence table needs at least 2 eps values");
      if (run.replicates < 10) bad("run.replicates", "the convergence table needs at least 10 paths");
      break;
    case ExperimentKind::Tanaka:
      if (eps.empty()) bad("eps", "need at least one eps");
      if (strides.size() < 2) bad("tanaka.strides", "need at least two strides");
      for (int st : strides)
        if (st < 1 || run.steps() % static_cast<std::size_t>(st) != 0)
          bad("tanaka.strides", "each stride must divide T/dt");
      if (lambdas.size() < 2) bad("lambdas", "need two lambda values");
      break;
    case ExperimentKind::Jumps:
      if (run.params.truncated()) bad("params.K", "jump exceedance needs an untruncated run (K = \"inf\")");
      if (jump_K.size() < 2) bad("jumps.K", "need at least two K values");
      for (double K : jump_K)
        if (!(K > 0.0)) bad("jumps.K", "K values must be > 0");
      break;
    case ExperimentKind::Regime:
      for (const auto& c : regime_cases) {
        if (!(c.alpha > 0.0 && c.alpha <= 2.0) || c.dim < 1 || !(c.beta > 0.0 && c.beta < 1.0))
          bad("regime.cases", "alpha in (0,2], dim >= 1, beta in (0,1)");
        if (!c.expected.empty() && c.expected != "SILT" && c.expected != "RENORMALIZED_SILT" && c.expected != "NONE")
          bad("regime.cases", "expected must be SILT, RENORMALIZED_SILT or NONE");
      }
      break;
    case ExperimentKind::Kernels:
      break;
  }
}

InitialDensity ExperimentConfig::initial_density() const {
  return InitialDensity::gaussian(run.params.dim, initial_sigma, initial_mass);
}

ExperimentConfig parse_config(const json& doc) {
  if (!doc.is_object()) throw ConfigurationError("config must be a JSON object");
  const json* schema = find(doc, "schema");
  if (!schema || !schema->is_string() || schema->get<std::string>() != ExperimentConfig::kSchema)
    bad("schema", std::string("must be \"") + ExperimentConfig::kSchema + "\"");
  const json* kind = find(doc, "kind");
  if (!kind || !kind->is_string()) bad("kind", "missing (one of kernels, moments, silt, tanaka, regime, jumps)");
  ExperimentConfig c = default_config(parse_kind(kind->get<std::string>()));

  const json* seed = find(doc, "seed");
  if (!seed) bad("seed", "missing; every run needs an explicit seed");
  if (!seed->is_number_unsigned()) bad("seed", "expected a non-negative integer");
  c.run.seed = seed->get<std::uint64_t>();

  const json& p = section(doc, "params");
  read(p, "alpha", "params.alpha", c.run.params.alpha);
  read(p, "dim", "params.dim", c.run.params.dim);
  read(p, "beta", "params.beta", c.run.params.beta);
  if (const json* K = find(p, "K")) {
    if (K->is_string() && K->get<std::string>() == "inf")
      c.run.params.K = kInfiniteK;
    else if (K->is_number())
      c.run.params.K = K->get<double>();
    else
      bad("params.K", "expected a number or \"inf\"");
  }
  c.grid.dim = c.run.params.dim;

  const json& r = section(doc, "run");
  read(r, "n", "run.n", c.run.n);
  read(r, "T", "run.T", c.run.T);
  read(r, "dt", "run.dt", c.run.dt);
  read(r, "replicates", "run.replicates", c.run.replicates);
  double cap = static_cast<double>(c.run.population_cap);
  read(r, "population_cap", "run.population_cap", cap);
  if (!(cap >= 1.0)) bad("run.population_cap", "must be >= 1");
  c.run.population_cap = static_cast<std::size_t>(cap);

  const json& init = section(doc, "initial");
  read(init, "sigma", "initial.sigma", c.initial_sigma);
  read(init, "mass", "initial.mass", c.initial_mass);

  const json& g = section(doc, "grid");
  read(g, "extent", "grid.extent", c.grid.extent);
  read(g, "h", "grid.h", c.grid.h);
  read(g, "margin", "grid.margin", c.grid.margin);

  const json& m = section(doc, "moments");
  read(m, "t", "moments.t", c.t);
  read(m, "s", "moments.s", c.s);
  read(m, "phi_sigma", "moments.phi_sigma", c.phi_sigma);
  read(m, "psi_sigma", "moments.psi_sigma", c.psi_sigma);

  read_list(doc, "eps", "eps", c.eps);
  read(doc, "lambda", "lambda", c.lambda);
  read_list(doc, "lambdas", "lambdas", c.lambdas);
  read(doc, "silt_oracle", "silt_oracle", c.silt_oracle);
  read_list(section(doc, "tanaka"), "strides", "tanaka.strides", c.strides);
  read_list(section(doc, "jumps"), "K", "jumps.K", c.jump_K);

  if (const json* cases = find(section(doc, "regime"), "cases")) {
    if (!cases->is_array()) bad("regime.cases", "expected an array");
    c.regime_cases.clear();
    for (const auto& e : *cases) {
      if (!e.is_object()) bad("regime.cases", "each case is an object {alpha, dim, beta[, expected]}");
      RegimeCase rc;
      read(e, "alpha", "regime.cases.alpha", rc.alpha);
      read(e, "dim", "regime.cases.dim", rc.dim);
      read(e, "beta", "regime.cases.beta", rc.beta);
      if (const json* ex = find(e, "expected")) {
        if (!ex->is_string()) bad("regime.cases.expected", "expected a string");
        rc.expected = ex->get<std::string>();
      }
      c.regime_cases.push_back(rc);
    }
  }

  const json& tol = section(doc, "tolerances");
  read(tol, "z", "tolerances.z", c.z_tolerance);
  read(tol, "slope", "tolerances.slope", c.slope_tolerance);

  if (const json* out = find(doc, "out")) {
    if (!out->is_string()) bad("out", "expected a path string");
    c.out_dir = out->get<std::string>();
  }
  c.validate();
  return c;
}

ExperimentConfig load_config(const std::filesystem::path& file) {
  std::ifstream is(file);
  if (!is) throw ConfigurationError("cannot open config " + file.string());
  json doc;
  try {
    doc = json::parse(is);
  } catch (const json::parse_error& e) {
    throw ConfigurationError("config " + file.string() + " is not valid JSON: " + e.what());
  }
  return parse_config(doc);
}

json to_json(const ExperimentConfig& c) {
  json cases = json::array();
  for (const auto& rc : c.regime_cases)
    cases.push_back({{"alpha", rc.alpha}, {"dim", rc.dim}, {"beta", rc.beta}, {"expected", rc.expected}});
  return {
      {"schema", ExperimentConfig::kSchema},
      {"kind", to_string(c.kind)},
      {"seed", c.run.seed},
      {"params",
       {{"alpha", c.run.params.alpha}, {"dim", c.run.params.dim}, {"beta", c.run.params.beta}, {"K", k_to_json(c.run.params.K)}}},
      {"run",
       {{"n", c.run.n},
        {"T", c.run.T},
        {"dt", c.run.dt},
        {"replicates", c.run.replicates},
        {"population_cap", c.run.population_cap}}},
      {"initial", {{"sigma", c.initial_sigma}, {"mass", c.initial_mass}}},
      {"grid", {{"extent", c.grid.extent}, {"h", c.grid.h}, {"margin", c.grid.margin}}},
      {"moments", {{"t", c.t}, {"s", c.s}, {"phi_sigma", c.phi_sigma}, {"psi_sigma", c.psi_sigma}}},
      {"eps", c.eps},
      {"lambda", c.lambda},
      {"lambdas", c.lambdas},
      {"silt_oracle", c.silt_oracle},
      {"tanaka", {{"strides", c.strides}}},
      {"jumps", {{"K", c.jump_K}}},
      {"regime", {{"cases", cases}}},
      {"tolerances", {{"z", c.z_tolerance}, {"slope", c.slope_tolerance}}},
      {"out", c.out_dir.string()},
  };
}

}  // namespace siltlab
