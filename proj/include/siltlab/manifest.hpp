#pragma once

// Run manifest (schema "siltlab.manifest/1"): config echo, code version,
// per-replicate seeds, wall time and SHA-256 digests of every output.

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

namespace siltlab {

std::string code_version();

/// Lower-case hex SHA-256 of a file's bytes.
std::string sha256_file(const std::filesystem::path& file);

class RunManifest {
 public:
  RunManifest(std::filesystem::path file, nlohmann::json config);

  void set_seeds(std::vector<std::uint64_t> seeds) { seeds_ = std::move(seeds); }
  void add_output(const std::filesystem::path& file) { outputs_.push_back(file); }

  /// Writes the manifest with status "running" and no digests.
  void begin();
  /// Rewrites it with status, wall time, assertion results and digests.
  void finalize(int exit_status, double wall_seconds, const nlohmann::json& assertions);

  const std::filesystem::path& file() const { return file_; }

 private:
  nlohmann::json document(const std::string& status) const;

  std::filesystem::path file_;
  nlohmann::json config_;
  std::vector<std::uint64_t> seeds_;
  std::vector<std::filesystem::path> outputs_;
};

}  // namespace siltlab
