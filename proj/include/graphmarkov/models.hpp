#pragma once

#include "graphmarkov/graph.hpp"
#include "graphmarkov/series.hpp"

#include <span>
#include <string>
#include <variant>
#include <vector>

namespace gmn {

/// A batch of B windows laid out step-major: `inputs[j]` is the B x S matrix
/// of history step j (j = 0 oldest, j = n-1 newest).
struct Batch {
  std::vector<Matrix> inputs;
  std::vector<Matrix> input_masks;
  Matrix labels;      // B x S
  Matrix label_mask;  // B x S

  Index size() const { return labels.rows(); }
  int history() const { return static_cast<int>(inputs.size()); }
  Index sensors() const { return labels.cols(); }
};

Batch make_batch(std::span<const Sample> samples);

/// Cumulative missing-mask products for one window.
///
/// `mask` is n x S, oldest row first. Row i of the result (i = 0 for the
/// newest step) is the product of (1 - m) over the i most recent steps, so
/// row 0 is all ones.
Matrix cumulative_mask(const Matrix& mask);

/// The gated inputs z_i = x_{t-i} o C[i] of every term, each B x S, newest
/// first.
std::vector<Matrix> gated_history(const Batch& batch);

enum class ModelKind { gmn, sgmn };

std::string to_string(ModelKind kind);
ModelKind parse_model_kind(const std::string& text);

/// Dense hop-masked model: yhat = sum_i gamma^{i+1} (mask_{i+1} o W_{i+1}) z_i.
struct GmnParams {
  std::vector<Matrix> weights;  // W_1..W_n, S x S each
  HopMaskSet hop_masks;
  double gamma = 0.9;

  int history() const { return static_cast<int>(weights.size()); }
  Index sensors() const { return weights.empty() ? 0 : weights.front().rows(); }
};

/// Spectral model: yhat = sum_i gamma^{i+1} U diag(lambda_{i+1}) U^T z_i.
struct SgmnParams {
  std::vector<Vector> spectral_weights;  // diagonals of Lambda_1..Lambda_n
  SpectralBasis basis;
  double gamma = 0.9;

  int history() const { return static_cast<int>(spectral_weights.size()); }
  Index sensors() const { return basis.size(); }
};

using ModelParams = std::variant<GmnParams, SgmnParams>;

struct GmnGradients {
  std::vector<Matrix> weights;
};

struct SgmnGradients {
  std::vector<Vector> spectral_weights;
};

using ModelGradients = std::variant<GmnGradients, SgmnGradients>;

/// Persistence warm start: W_1 = I, W_{k>1} = 0.
GmnParams init_gmn(const Graph& graph, int n, double gamma);
/// Persistence warm start: lambda_1 = 1, lambda_{k>1} = 0.
SgmnParams init_sgmn(const SpectralBasis& basis, int n, double gamma);
ModelParams init_params(ModelKind kind, const Graph& graph, int n, double gamma);

/// Zeroes every weight outside its hop mask.
void apply_support(GmnParams& params);

Matrix forward(const GmnParams& params, const Batch& batch);
Matrix forward(const SgmnParams& params, const Batch& batch);
Matrix forward(const ModelParams& params, const Batch& batch);

/// Gradients of a scalar loss given dL/dyhat (B x S).
GmnGradients backward(const GmnParams& params, const Batch& batch, const Matrix& output_grad);
SgmnGradients backward(const SgmnParams& params, const Batch& batch, const Matrix& output_grad);
ModelGradients backward(const ModelParams& params, const Batch& batch, const Matrix& output_grad);

/// The effective S x S map applied to history step k (1-based):
/// mask_k o W_k for GMN, U diag(lambda_k) U^T for SGMN.
Matrix effective_weight(const GmnParams& params, int k);
Matrix effective_weight(const SgmnParams& params, int k);
Matrix effective_weight(const ModelParams& params, int k);

ModelKind kind_of(const ModelParams& params);
int history_of(const ModelParams& params);
Index sensors_of(const ModelParams& params);
double gamma_of(const ModelParams& params);

}  // namespace gmn
