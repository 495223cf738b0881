#pragma once

// SPR1 binary dump of a PathRecord (layout in docs/formats.md).

#include <filesystem>

#include "siltlab/particle_simulator.hpp"

namespace siltlab {

void dump_path(const PathRecord& path, const std::filesystem::path& file);
PathRecord load_path(const std::filesystem::path& file);

}  // namespace siltlab
