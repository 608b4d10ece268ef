#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>

#include "dwpt/field.hpp"
#include "dwpt/potential.hpp"

namespace dwpt {

inline constexpr int kSnapshotVersion = 1;

/// A field on disk together with what produced it.
///
/// Text layout (one item per line):
///   dwpt-snapshot <version>
///   grid <json>
///   epsilon <hex float> <decimal mirror>
///   potential <json>
///   config_hash <16 hex digits>
///   values <count>
///   <hex float> <decimal mirror>      (count lines, row-major on the torus)
///   end
/// Only the hexadecimal columns are read back, so load(save(f)) is bit-exact.
struct Snapshot {
  Field field;
  Potential potential = Potential::quartic();
  std::uint64_t config_hash = 0;
};

/// FNV-1a over the compact JSON dump of a run configuration.
std::uint64_t config_hash(const nlohmann::json& config);

void write_snapshot(std::ostream& out, const Snapshot& s);
Snapshot read_snapshot(std::istream& in);

void save_snapshot(const Snapshot& s, const std::filesystem::path& path);
Snapshot load_snapshot(const std::filesystem::path& path);

}  // namespace dwpt
