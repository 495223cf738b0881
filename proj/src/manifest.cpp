#include "siltlab/manifest.hpp"

#include <openssl/evp.h>

#include <fstream>
#include <iomanip>
#include <memory>
#include <sstream>

#include "siltlab/errors.hpp"

#ifndef SILTLAB_VERSION
#define SILTLAB_VERSION "unknown"
#endif

namespace siltlab {

std::string code_version() { return SILTLAB_VERSION; }

std::string sha256_file(const std::filesystem::path& file) {
  std::ifstream is(file, std::ios::binary);
  if (!is) throw ConfigurationError("cannot read " + file.string() + " for hashing");
  std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(), EVP_MD_CTX_free);
  if (!ctx || EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr) != 1) throw NumericalError("SHA-256 init failed");
  char buf[1 << 16];
  while (is) {
    is.read(buf, sizeof buf);
    if (is.gcount() > 0) EVP_DigestUpdate(ctx.get(), buf, static_cast<std::size_t>(is.gcount()));
  }
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  EVP_DigestFinal_ex(ctx.get(), md, &len);
  std::ostringstream hex;
  for (unsigned int i = 0; i < len; ++i) hex << std::hex << std::setw(2) << std::setfill('0') << static_cast<int>(md[i]);
  return hex.str();
}

RunManifest::RunManifest(std::filesystem::path file, nlohmann::json config)
    : file_(std::move(file)), config_(std::move(config)) {}

nlohmann::json RunManifest::document(const std::string& status) const {
  return {{"schema", "siltlab.manifest/1"},
          {"version", code_version()},
          {"status", status},
          {"config", config_},
          {"seeds", seeds_}};
}

namespace {

void write_json(const std::filesystem::path& file, const nlohmann::json& doc) {
  if (file.has_parent_path()) std::filesystem::create_directories(file.parent_path());
  std::ofstream os(file, std::ios::binary);
  if (!os) throw ConfigurationError("cannot open " + file.string() + " for writing");
  os << doc.dump(2) << '\n';
}

}  // namespace

void RunManifest::begin() { write_json(file_, document("running")); }

void RunManifest::finalize(int exit_status, double wall_seconds, const nlohmann::json& assertions) {
  auto doc = document(exit_status == 0 ? "passed" : "failed");
  doc["exit_status"] = exit_status;
  doc["wall_time_s"] = wall_seconds;
  doc["assertions"] = assertions;
  nlohmann::json outputs = nlohmann::json::array();
  for (const auto& f : outputs_)
    outputs.push_back({{"file", f.filename().string()}, {"sha256", sha256_file(f)}, {"bytes", std::filesystem::file_size(f)}});
  doc["outputs"] = outputs;
  write_json(file_, doc);
}

}  // namespace siltlab
