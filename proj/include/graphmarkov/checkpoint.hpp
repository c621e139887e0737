#pragma once

#include "graphmarkov/models.hpp"
#include "graphmarkov/series.hpp"

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace gmn {

/// A trained model plus what is needed to rebuild its data pipeline.
///
/// On disk: a `key=value` header (kind, nodes, history, gamma, optional
/// normalization, `meta.*` entries) followed by `[block name index rows cols]`
/// sections holding CSV rows. Doubles are written with 17 significant digits
/// so reading back is bit-exact.
struct Checkpoint {
  ModelParams params;
  Matrix adjacency;
  std::optional<NormStats> norm;
  std::vector<std::pair<std::string, std::string>> metadata;

  std::optional<std::string> meta(const std::string& key) const;
  void set_meta(const std::string& key, const std::string& value);
};

void write_checkpoint(std::ostream& out, const Checkpoint& checkpoint);
Checkpoint read_checkpoint(std::istream& in);

void save_checkpoint(const std::filesystem::path& path, const Checkpoint& checkpoint);
Checkpoint load_checkpoint(const std::filesystem::path& path);

}  // namespace gmn
