#pragma once

#include <chrono>
#include <filesystem>
#include <string>
#include <utility>
#include <vector>

namespace gmn::cli {

/// Hex SHA-256 of a file's bytes.
std::string sha256_file(const std::filesystem::path& path);

/// Flat key=value record of one CLI invocation. Records are appended to a
/// manifest file, separated by blank lines.
class RunManifest {
 public:
  explicit RunManifest(std::string subcommand);

  void set(const std::string& key, const std::string& value);
  void add_digest(const std::string& key, const std::filesystem::path& path);
  const std::vector<std::pair<std::string, std::string>>& entries() const { return entries_; }

  /// Stamps the end time and appends the record to `path`.
  void append_to(const std::filesystem::path& path);

 private:
  std::vector<std::pair<std::string, std::string>> entries_;
};

/// Parses every record of a manifest file.
std::vector<std::vector<std::pair<std::string, std::string>>> read_manifest(const std::filesystem::path& path);

}  // namespace gmn::cli
