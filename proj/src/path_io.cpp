#include "siltlab/path_io.hpp"

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>

#include "siltlab/errors.hpp"

namespace siltlab {

static_assert(std::endian::native == std::endian::little, "SPR1 files are written in host byte order");

namespace {

constexpr char kMagic[4] = {'S', 'P', 'R', '1'};

void put(std::ofstream& os, double v) { os.write(reinterpret_cast<const char*>(&v), 8); }
void put(std::ofstream& os, std::uint64_t v) { os.write(reinterpret_cast<const char*>(&v), 8); }

template <class T>
T get(std::ifstream& is) {
  T v{};
  is.read(reinterpret_cast<char*>(&v), 8);
  if (!is) throw ConfigurationError("truncated SPR1 file");
  return v;
}

}  // namespace

void dump_path(const PathRecord& path, const std::filesystem::path& file) {
  if (path.times.size() != path.snapshots.size() || path.times.size() < 2)
    throw ConfigurationError("path record has no snapshot grid");
  std::ofstream os(file, std::ios::binary);
  if (!os) throw ConfigurationError("cannot open " + file.string() + " for writing");
  const std::uint64_t d = static_cast<std::uint64_t>(path.dim);
  const std::uint64_t J = path.times.size() - 1;
  os.write(kMagic, 4);
  put(os, d);
  put(os, path.n);
  put(os, J);
  put(os, static_cast<std::uint64_t>(path.events.size()));
  for (double t : path.times) put(os, t);
  std::uint64_t offset = 0;
  put(os, offset);
  for (const auto& s : path.snapshots) {
    offset += s.size();
    put(os, offset);
  }
  for (const auto& s : path.snapshots)
    for (double x : s.positions()) put(os, x);
  for (const auto& e : path.events) {
    put(os, e.time);
    for (std::uint64_t a = 0; a < d; ++a) put(os, e.position[a]);
    put(os, e.offspring);
  }
  if (!os) throw ConfigurationError("write failed: " + file.string());
}

PathRecord load_path(const std::filesystem::path& file) {
  std::ifstream is(file, std::ios::binary);
  if (!is) throw ConfigurationError("cannot open " + file.string());
  char magic[4];
  is.read(magic, 4);
  if (!is || std::memcmp(magic, kMagic, 4) != 0) throw ConfigurationError("not an SPR1 file: " + file.string());
  PathRecord p;
  const auto d = get<std::uint64_t>(is);
  p.n = get<double>(is);
  const auto J = get<std::uint64_t>(is);
  const auto events = get<std::uint64_t>(is);
  if (d < 1 || d > 3 || J < 1 || J > (1u << 24) || !(p.n >= 1.0)) throw ConfigurationError("corrupt SPR1 header");
  p.dim = static_cast<int>(d);
  p.times.resize(J + 1);
  for (auto& t : p.times) t = get<double>(is);
  p.dt = p.times[1] - p.times[0];
  std::vector<std::uint64_t> offsets(J + 2);
  for (auto& o : offsets) o = get<std::uint64_t>(is);
  for (std::uint64_t j = 0; j <= J; ++j) {
    if (offsets[j + 1] < offsets[j]) throw ConfigurationError("corrupt SPR1 offsets");
    ParticleCloud c(p.dim, p.n, p.times[j]);
    c.positions().resize((offsets[j + 1] - offsets[j]) * d);
    for (auto& x : c.positions()) x = get<double>(is);
    p.snapshots.push_back(std::move(c));
  }
  p.events.resize(events);
  for (auto& e : p.events) {
    e.time = get<double>(is);
    for (std::uint64_t a = 0; a < d; ++a) e.position[a] = get<double>(is);
    e.offspring = get<std::uint64_t>(is);
  }
  return p;
}

}  // namespace siltlab
