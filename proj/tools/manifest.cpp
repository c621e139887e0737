#include "manifest.hpp"

#include "graphmarkov/series.hpp"

#include <openssl/evp.h>

#include <array>
#include <fstream>
#include <memory>
#include <stdexcept>

namespace gmn::cli {

namespace {

std::string utc_now() {
  const auto now = std::chrono::system_clock::now();
  return format_iso8601(std::chrono::duration_cast<std::chrono::seconds>(now.time_since_epoch()).count()) + "Z";
}

}  // namespace

std::string sha256_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::invalid_argument("cannot open " + path.string());

  std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(), &EVP_MD_CTX_free);
  if (!ctx || EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr) != 1) {
    throw std::runtime_error("SHA-256 initialisation failed");
  }
  std::array<char, 1 << 16> buffer{};
  while (in) {
    in.read(buffer.data(), buffer.size());
    if (in.gcount() > 0) EVP_DigestUpdate(ctx.get(), buffer.data(), static_cast<std::size_t>(in.gcount()));
  }
  std::array<unsigned char, EVP_MAX_MD_SIZE> digest{};
  unsigned int length = 0;
  EVP_DigestFinal_ex(ctx.get(), digest.data(), &length);

  static constexpr char kHex[] = "0123456789abcdef";
  std::string hex;
  for (unsigned int i = 0; i < length; ++i) {
    hex.push_back(kHex[digest[i] >> 4]);
    hex.push_back(kHex[digest[i] & 0xF]);
  }
  return hex;
}

RunManifest::RunManifest(std::string subcommand) {
  entries_.emplace_back("subcommand", std::move(subcommand));
  entries_.emplace_back("start", utc_now());
}

void RunManifest::set(const std::string& key, const std::string& value) {
  for (auto& [k, v] : entries_) {
    if (k == key) {
      v = value;
      return;
    }
  }
  entries_.emplace_back(key, value);
}

void RunManifest::add_digest(const std::string& key, const std::filesystem::path& path) {
  set("sha256." + key, sha256_file(path));
}

void RunManifest::append_to(const std::filesystem::path& path) {
  set("end", utc_now());
  std::ofstream out(path, std::ios::app);
  if (!out) throw std::runtime_error("cannot write manifest " + path.string());
  for (const auto& [key, value] : entries_) out << key << '=' << value << '\n';
  out << '\n';
}

std::vector<std::vector<std::pair<std::string, std::string>>> read_manifest(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open manifest " + path.string());
  std::vector<std::vector<std::pair<std::string, std::string>>> records(1);
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) {
      if (!records.back().empty()) records.emplace_back();
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw std::invalid_argument("malformed manifest line '" + line + "'");
    records.back().emplace_back(line.substr(0, eq), line.substr(eq + 1));
  }
  if (records.back().empty()) records.pop_back();
  return records;
}

}  // namespace gmn::cli
