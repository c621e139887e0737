#include "graphmarkov/models.hpp"

#include <stdexcept>

namespace gmn {

namespace {

void check_batch(const Batch& batch, int history, Index sensors) {
  if (batch.history() != history) {
    throw std::invalid_argument("batch history " + std::to_string(batch.history()) +
                                " does not match model history " + std::to_string(history));
  }
  if (batch.sensors() != sensors) {
    throw std::invalid_argument("batch has " + std::to_string(batch.sensors()) + " sensors, model has " +
                                std::to_string(sensors));
  }
  if (static_cast<int>(batch.input_masks.size()) != history) {
    throw std::invalid_argument("batch masks do not match its inputs");
  }
  for (int j = 0; j < history; ++j) {
    const auto& x = batch.inputs[static_cast<std::size_t>(j)];
    const auto& m = batch.input_masks[static_cast<std::size_t>(j)];
    if (x.rows() != batch.size() || x.cols() != sensors || m.rows() != x.rows() || m.cols() != x.cols()) {
      throw std::invalid_argument("batch step " + std::to_string(j) + " has inconsistent shape");
    }
  }
}

void check_output_grad(const Batch& batch, const Matrix& output_grad) {
  if (output_grad.rows() != batch.size() || output_grad.cols() != batch.sensors()) {
    throw std::invalid_argument("output gradient shape does not match batch");
  }
}

void check_gamma(double gamma) {
  if (!(gamma > 0.0 && gamma < 1.0)) {
    throw std::invalid_argument("gamma must lie in (0, 1), got " + std::to_string(gamma));
  }
}

void check_history(int n) {
  if (n < 1) throw std::invalid_argument("history length n must be >= 1, got " + std::to_string(n));
}

}  // namespace

Batch make_batch(std::span<const Sample> samples) {
  if (samples.empty()) throw std::invalid_argument("cannot build an empty batch");
  const int n = samples.front().history();
  const Index sensors = samples.front().sensors();
  const Index size = static_cast<Index>(samples.size());

  Batch batch;
  batch.inputs.assign(static_cast<std::size_t>(n), Matrix(size, sensors));
  batch.input_masks.assign(static_cast<std::size_t>(n), Matrix(size, sensors));
  batch.labels.resize(size, sensors);
  batch.label_mask.resize(size, sensors);
  for (Index b = 0; b < size; ++b) {
    const Sample& sample = samples[static_cast<std::size_t>(b)];
    if (sample.history() != n || sample.sensors() != sensors || sample.label.size() != sensors) {
      throw std::invalid_argument("samples in a batch must share history length and sensor count");
    }
    for (int j = 0; j < n; ++j) {
      batch.inputs[static_cast<std::size_t>(j)].row(b) = sample.inputs.row(j);
      batch.input_masks[static_cast<std::size_t>(j)].row(b) = sample.input_mask.row(j);
    }
    batch.labels.row(b) = sample.label.transpose();
    batch.label_mask.row(b) = sample.label_mask.transpose();
  }
  return batch;
}

Matrix cumulative_mask(const Matrix& mask) {
  const Index n = mask.rows();
  Matrix cumulative(n, mask.cols());
  if (n == 0) return cumulative;
  cumulative.row(0).setOnes();
  for (Index i = 1; i < n; ++i) {
    // Step t-(i-1) sits at row n-i of the oldest-first mask.
    cumulative.row(i) = cumulative.row(i - 1).cwiseProduct((1.0 - mask.row(n - i).array()).matrix());
  }
  return cumulative;
}

std::vector<Matrix> gated_history(const Batch& batch) {
  const int n = batch.history();
  std::vector<Matrix> gated;
  gated.reserve(static_cast<std::size_t>(n));
  Matrix carry = Matrix::Ones(batch.size(), batch.sensors());
  for (int i = 0; i < n; ++i) {
    const auto step = static_cast<std::size_t>(n - 1 - i);
    gated.push_back(batch.inputs[step].cwiseProduct(carry));
    if (i + 1 < n) carry = carry.cwiseProduct((1.0 - batch.input_masks[step].array()).matrix());
  }
  return gated;
}

std::string to_string(ModelKind kind) { return kind == ModelKind::gmn ? "gmn" : "sgmn"; }

ModelKind parse_model_kind(const std::string& text) {
  if (text == "gmn") return ModelKind::gmn;
  if (text == "sgmn") return ModelKind::sgmn;
  throw std::invalid_argument("unknown model kind '" + text + "' (expected gmn or sgmn)");
}

GmnParams init_gmn(const Graph& graph, int n, double gamma) {
  check_history(n);
  check_gamma(gamma);
  GmnParams params;
  params.gamma = gamma;
  params.hop_masks = hop_masks(graph, n);
  const Index size = graph.size();
  params.weights.assign(static_cast<std::size_t>(n), Matrix::Zero(size, size));
  params.weights.front() = Matrix::Identity(size, size).cwiseProduct(params.hop_masks.mask(1));
  return params;
}

SgmnParams init_sgmn(const SpectralBasis& basis, int n, double gamma) {
  check_history(n);
  check_gamma(gamma);
  SgmnParams params;
  params.gamma = gamma;
  params.basis = basis;
  params.spectral_weights.assign(static_cast<std::size_t>(n), Vector::Zero(basis.size()));
  params.spectral_weights.front().setOnes();
  return params;
}

ModelParams init_params(ModelKind kind, const Graph& graph, int n, double gamma) {
  if (kind == ModelKind::gmn) return init_gmn(graph, n, gamma);
  return init_sgmn(laplacian_basis(graph), n, gamma);
}

void apply_support(GmnParams& params) {
  for (int k = 1; k <= params.history(); ++k) {
    auto& w = params.weights[static_cast<std::size_t>(k - 1)];
    w = w.cwiseProduct(params.hop_masks.mask(k));
  }
}

Matrix effective_weight(const GmnParams& params, int k) {
  if (k < 1 || k > params.history()) {
    throw std::out_of_range("step index " + std::to_string(k) + " outside 1.." + std::to_string(params.history()));
  }
  return params.hop_masks.mask(k).cwiseProduct(params.weights[static_cast<std::size_t>(k - 1)]);
}

Matrix effective_weight(const SgmnParams& params, int k) {
  if (k < 1 || k > params.history()) {
    throw std::out_of_range("step index " + std::to_string(k) + " outside 1.." + std::to_string(params.history()));
  }
  const Matrix& u = params.basis.eigenvectors;
  return u * params.spectral_weights[static_cast<std::size_t>(k - 1)].asDiagonal() * u.transpose();
}

Matrix effective_weight(const ModelParams& params, int k) {
  return std::visit([k](const auto& p) { return effective_weight(p, k); }, params);
}

Matrix forward(const GmnParams& params, const Batch& batch) {
  check_batch(batch, params.history(), params.sensors());
  const auto gated = gated_history(batch);
  Matrix out = Matrix::Zero(batch.size(), batch.sensors());
  double scale = 1.0;
  for (int i = 0; i < params.history(); ++i) {
    scale *= params.gamma;
    // Rows are batch elements, so H z becomes Z H^T.
    out.noalias() += scale * (gated[static_cast<std::size_t>(i)] * effective_weight(params, i + 1).transpose());
  }
  return out;
}

Matrix forward(const SgmnParams& params, const Batch& batch) {
  check_batch(batch, params.history(), params.sensors());
  const Matrix& u = params.basis.eigenvectors;
  const auto gated = gated_history(batch);
  Matrix out = Matrix::Zero(batch.size(), batch.sensors());
  double scale = 1.0;
  for (int i = 0; i < params.history(); ++i) {
    scale *= params.gamma;
    Matrix spectral = gated[static_cast<std::size_t>(i)] * u;
    spectral.array().rowwise() *= params.spectral_weights[static_cast<std::size_t>(i)].transpose().array();
    out.noalias() += scale * (spectral * u.transpose());
  }
  return out;
}

Matrix forward(const ModelParams& params, const Batch& batch) {
  return std::visit([&batch](const auto& p) { return forward(p, batch); }, params);
}

GmnGradients backward(const GmnParams& params, const Batch& batch, const Matrix& output_grad) {
  check_batch(batch, params.history(), params.sensors());
  check_output_grad(batch, output_grad);
  const auto gated = gated_history(batch);
  GmnGradients grads;
  grads.weights.reserve(static_cast<std::size_t>(params.history()));
  double scale = 1.0;
  for (int i = 0; i < params.history(); ++i) {
    scale *= params.gamma;
    Matrix outer = output_grad.transpose() * gated[static_cast<std::size_t>(i)];
    grads.weights.push_back(scale * outer.cwiseProduct(params.hop_masks.mask(i + 1)));
  }
  return grads;
}

SgmnGradients backward(const SgmnParams& params, const Batch& batch, const Matrix& output_grad) {
  check_batch(batch, params.history(), params.sensors());
  check_output_grad(batch, output_grad);
  const Matrix& u = params.basis.eigenvectors;
  const auto gated = gated_history(batch);
  const Matrix grad_spectral = output_grad * u;
  SgmnGradients grads;
  grads.spectral_weights.reserve(static_cast<std::size_t>(params.history()));
  double scale = 1.0;
  for (int i = 0; i < params.history(); ++i) {
    scale *= params.gamma;
    const Matrix input_spectral = gated[static_cast<std::size_t>(i)] * u;
    grads.spectral_weights.push_back(scale * grad_spectral.cwiseProduct(input_spectral).colwise().sum().transpose());
  }
  return grads;
}

ModelGradients backward(const ModelParams& params, const Batch& batch, const Matrix& output_grad) {
  return std::visit([&](const auto& p) -> ModelGradients { return backward(p, batch, output_grad); }, params);
}

ModelKind kind_of(const ModelParams& params) {
  return std::holds_alternative<GmnParams>(params) ? ModelKind::gmn : ModelKind::sgmn;
}

int history_of(const ModelParams& params) {
  return std::visit([](const auto& p) { return p.history(); }, params);
}

Index sensors_of(const ModelParams& params) {
  return std::visit([](const auto& p) { return p.sensors(); }, params);
}

double gamma_of(const ModelParams& params) {
  return std::visit([](const auto& p) { return p.gamma; }, params);
}

}  // namespace gmn
