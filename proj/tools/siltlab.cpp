#include <cstdlib>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "siltlab/errors.hpp"
#include "siltlab/experiment_harness.hpp"

int main(int argc, char** argv) {
  using namespace siltlab;

  CLI::App app{"siltlab: Monte Carlo and oracle experiments for the self-intersection local time of\n"
               "(alpha, d, beta)-superprocesses and their particle approximations.\n\n" +
               kinds_help()};

  std::string kind_name;
  std::string config_file;
  std::optional<std::uint64_t> seed;
  int workers = 1;
  std::optional<std::string> out_dir;
  std::optional<std::string> dump_dir;

  std::vector<std::string> names;
  for (auto k : all_kinds()) names.push_back(to_string(k));
  app.add_option("kind", kind_name, "experiment kind")->required()->check(CLI::IsMember(names));
  app.add_option("--config", config_file, "JSON config (schema siltlab.config/1); defaults of the kind if absent")
      ->check(CLI::ExistingFile);
  app.add_option("--seed", seed, "master seed, overrides the config");
  app.add_option("--workers", workers, "worker threads for replicates")->check(CLI::PositiveNumber);
  app.add_option("--out", out_dir, "output directory (SILTLAB_OUT overrides)");
  app.add_option("--dump-paths", dump_dir, "write every simulated path as DIR/path_NNNNN.spr1");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return e.get_exit_code() == 0 ? 0 : 2;
  }

  try {
    const ExperimentKind kind = parse_kind(kind_name);
    ExperimentConfig cfg = config_file.empty() ? default_config(kind) : load_config(config_file);
    if (cfg.kind != kind)
      throw ConfigurationError("config field 'kind': file says " + to_string(cfg.kind) + ", command line says " + kind_name);
    if (seed) cfg.run.seed = *seed;
    if (out_dir) cfg.out_dir = *out_dir;
    if (const char* env = std::getenv("SILTLAB_OUT"); env && *env) cfg.out_dir = env;

    HarnessOptions opts;
    opts.workers = workers;
    opts.log = &std::cerr;
    if (dump_dir) opts.dump_paths = *dump_dir;
    const int status = run_experiment(cfg, opts);
    std::cerr << "siltlab: " << (status == 0 ? "all assertions passed" : "assertions failed") << ", outputs in "
              << cfg.out_dir.string() << '\n';
    return status;
  } catch (const ConfigurationError& e) {
    std::cerr << "siltlab: configuration error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "siltlab: " << e.what() << '\n';
    return 1;
  }
}
