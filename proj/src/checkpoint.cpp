#include "graphmarkov/checkpoint.hpp"

#include "graphmarkov/matrix_io.hpp"

#include <charconv>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace gmn {

namespace {

constexpr const char* kMagic = "graphmarkov-checkpoint v1";

void write_block(std::ostream& out, const std::string& name, int index, const Matrix& block) {
  out << "[block " << name << ' ' << index << ' ' << block.rows() << ' ' << block.cols() << "]\n";
  write_matrix_csv(out, block);
}

double parse_number(const std::string& text, const std::string& what) {
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size()) {
    throw std::invalid_argument("checkpoint: bad value for " + what + ": '" + text + "'");
  }
  return value;
}

long long parse_integer(const std::string& text, const std::string& what) {
  long long value = 0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size()) {
    throw std::invalid_argument("checkpoint: bad value for " + what + ": '" + text + "'");
  }
  return value;
}

struct BlockKey {
  std::string name;
  int index;
  bool operator<(const BlockKey& other) const {
    return name != other.name ? name < other.name : index < other.index;
  }
};

}  // namespace

std::optional<std::string> Checkpoint::meta(const std::string& key) const {
  for (const auto& [k, v] : metadata) {
    if (k == key) return v;
  }
  return std::nullopt;
}

void Checkpoint::set_meta(const std::string& key, const std::string& value) {
  if (key.find_first_of("=\n") != std::string::npos || value.find('\n') != std::string::npos) {
    throw std::invalid_argument("checkpoint metadata may not contain '=' in keys or newlines");
  }
  for (auto& [k, v] : metadata) {
    if (k == key) {
      v = value;
      return;
    }
  }
  metadata.emplace_back(key, value);
}

void write_checkpoint(std::ostream& out, const Checkpoint& checkpoint) {
  const ModelParams& params = checkpoint.params;
  const Index size = sensors_of(params);
  if (checkpoint.adjacency.rows() != size || checkpoint.adjacency.cols() != size) {
    throw std::invalid_argument("checkpoint adjacency does not match model size");
  }
  out << kMagic << '\n';
  out << "kind=" << to_string(kind_of(params)) << '\n';
  out << "nodes=" << size << '\n';
  out << "history=" << history_of(params) << '\n';
  out << "gamma=" << format_double(gamma_of(params)) << '\n';
  if (checkpoint.norm) {
    out << "norm_min=" << format_double(checkpoint.norm->min) << '\n';
    out << "norm_max=" << format_double(checkpoint.norm->max) << '\n';
  }
  for (const auto& [key, value] : checkpoint.metadata) out << "meta." << key << '=' << value << '\n';

  write_block(out, "adjacency", 0, checkpoint.adjacency);
  if (const auto* gmn = std::get_if<GmnParams>(&params)) {
    for (int k = 1; k <= gmn->history(); ++k) write_block(out, "weights", k, gmn->weights[static_cast<std::size_t>(k - 1)]);
  } else {
    const auto& sgmn = std::get<SgmnParams>(params);
    write_block(out, "eigenvalues", 0, sgmn.basis.eigenvalues.transpose());
    write_block(out, "eigenvectors", 0, sgmn.basis.eigenvectors);
    for (int k = 1; k <= sgmn.history(); ++k) {
      write_block(out, "spectral_weights", k, sgmn.spectral_weights[static_cast<std::size_t>(k - 1)].transpose());
    }
  }
}

Checkpoint read_checkpoint(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line != kMagic) {
    throw std::invalid_argument("not a graphmarkov checkpoint (bad first line)");
  }
  std::map<std::string, std::string> header;
  Checkpoint checkpoint;
  std::map<BlockKey, Matrix> blocks;

  bool in_blocks = false;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line.front() == '[') {
      in_blocks = true;
      if (line.back() != ']') throw std::invalid_argument("checkpoint: malformed block header '" + line + "'");
      std::istringstream spec(line.substr(1, line.size() - 2));
      std::string tag, name;
      int index = 0;
      Index rows = 0, cols = 0;
      if (!(spec >> tag >> name >> index >> rows >> cols) || tag != "block" || rows < 0 || cols < 0) {
        throw std::invalid_argument("checkpoint: malformed block header '" + line + "'");
      }
      std::ostringstream body;
      for (Index r = 0; r < rows; ++r) {
        if (!std::getline(in, line)) throw std::invalid_argument("checkpoint: truncated block " + name);
        body << line << '\n';
      }
      std::istringstream body_in(body.str());
      Matrix block = parse_matrix_csv(body_in);
      if (block.rows() != rows || block.cols() != cols) {
        throw std::invalid_argument("checkpoint: block " + name + " has the wrong shape");
      }
      blocks[{name, index}] = std::move(block);
      continue;
    }
    if (in_blocks) throw std::invalid_argument("checkpoint: unexpected line after blocks: '" + line + "'");
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw std::invalid_argument("checkpoint: malformed header line '" + line + "'");
    const std::string key = line.substr(0, eq);
    const std::string value = line.substr(eq + 1);
    if (key.rfind("meta.", 0) == 0) {
      checkpoint.metadata.emplace_back(key.substr(5), value);
    } else {
      header[key] = value;
    }
  }

  const auto require = [&](const std::string& key) -> const std::string& {
    const auto it = header.find(key);
    if (it == header.end()) throw std::invalid_argument("checkpoint: missing header field '" + key + "'");
    return it->second;
  };
  const auto take_block = [&](const std::string& name, int index) -> Matrix& {
    const auto it = blocks.find({name, index});
    if (it == blocks.end()) {
      throw std::invalid_argument("checkpoint: missing block " + name + " " + std::to_string(index));
    }
    return it->second;
  };

  const ModelKind kind = parse_model_kind(require("kind"));
  const Index size = static_cast<Index>(parse_integer(require("nodes"), "nodes"));
  const int history = static_cast<int>(parse_integer(require("history"), "history"));
  const double gamma = parse_number(require("gamma"), "gamma");
  if (size < 1 || history < 1) throw std::invalid_argument("checkpoint: nodes and history must be positive");
  if (header.count("norm_min") || header.count("norm_max")) {
    checkpoint.norm = NormStats{parse_number(require("norm_min"), "norm_min"),
                                parse_number(require("norm_max"), "norm_max")};
  }

  checkpoint.adjacency = take_block("adjacency", 0);
  if (checkpoint.adjacency.rows() != size || checkpoint.adjacency.cols() != size) {
    throw std::invalid_argument("checkpoint: adjacency size does not match nodes");
  }
  const Graph graph = build_graph(checkpoint.adjacency);

  if (kind == ModelKind::gmn) {
    GmnParams params;
    params.gamma = gamma;
    params.hop_masks = hop_masks(graph, history);
    for (int k = 1; k <= history; ++k) {
      Matrix& w = take_block("weights", k);
      if (w.rows() != size || w.cols() != size) throw std::invalid_argument("checkpoint: weights have wrong shape");
      if ((w.array() * (1.0 - params.hop_masks.mask(k).array())).cwiseAbs().maxCoeff() != 0.0) {
        throw std::invalid_argument("checkpoint: weights " + std::to_string(k) + " lie outside their hop support");
      }
      params.weights.push_back(std::move(w));
    }
    checkpoint.params = std::move(params);
  } else {
    SgmnParams params;
    params.gamma = gamma;
    params.basis.eigenvalues = take_block("eigenvalues", 0).transpose();
    params.basis.eigenvectors = take_block("eigenvectors", 0);
    if (params.basis.eigenvalues.size() != size || params.basis.eigenvectors.rows() != size ||
        params.basis.eigenvectors.cols() != size) {
      throw std::invalid_argument("checkpoint: spectral basis has wrong shape");
    }
    for (int k = 1; k <= history; ++k) {
      const Matrix& lambda = take_block("spectral_weights", k);
      if (lambda.rows() != 1 || lambda.cols() != size) {
        throw std::invalid_argument("checkpoint: spectral weights have wrong shape");
      }
      params.spectral_weights.push_back(lambda.transpose());
    }
    checkpoint.params = std::move(params);
  }
  return checkpoint;
}

void save_checkpoint(const std::filesystem::path& path, const Checkpoint& checkpoint) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write checkpoint " + path.string());
  write_checkpoint(out, checkpoint);
  if (!out) throw std::runtime_error("failed writing checkpoint " + path.string());
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::invalid_argument("cannot open checkpoint " + path.string());
  return read_checkpoint(in);
}

}  // namespace gmn
