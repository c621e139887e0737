#include "graphmarkov/training.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <stdexcept>
#include <string>

namespace gmn {

void TrainConfig::validate() const {
  if (batch_size < 1) throw std::invalid_argument("batch size must be >= 1");
  if (!(lr_floor >= 0.0) || !(lr_init >= lr_floor) || !std::isfinite(lr_init)) {
    throw std::invalid_argument("learning rates must satisfy 0 <= lr_floor <= lr_init");
  }
  if (lr_patience < 1 || stop_patience < 1) throw std::invalid_argument("patience values must be >= 1");
  if (!(min_delta >= 0.0)) throw std::invalid_argument("min_delta must be >= 0");
  if (max_epochs < 1) throw std::invalid_argument("max_epochs must be >= 1");
}

double masked_mse(const Matrix& pred, const Matrix& label, const Matrix& label_mask) {
  if (pred.rows() != label.rows() || pred.cols() != label.cols() || label_mask.rows() != label.rows() ||
      label_mask.cols() != label.cols()) {
    throw std::invalid_argument("masked_mse operands have mismatched shapes");
  }
  const double count = label_mask.sum();
  if (count <= 0.0) throw std::invalid_argument("masked_mse needs at least one observed label");
  return (pred - label).cwiseProduct(label_mask).squaredNorm() / count;
}

namespace {

template <typename Block>
void adam_update(std::vector<Block>& params, const std::vector<Block>& grads, AdamState& state, double lr) {
  if (grads.size() != params.size()) throw std::invalid_argument("gradient count does not match parameters");
  for (std::size_t k = 0; k < params.size(); ++k) {
    if (grads[k].rows() != params[k].rows() || grads[k].cols() != params[k].cols()) {
      throw std::invalid_argument("gradient block " + std::to_string(k) + " has the wrong shape");
    }
    if (!grads[k].allFinite()) {
      throw std::runtime_error("non-finite gradient in parameter block " + std::to_string(k + 1));
    }
  }
  if (state.first_moment.empty()) {
    for (const auto& p : params) {
      state.first_moment.push_back(Vector::Zero(p.size()));
      state.second_moment.push_back(Vector::Zero(p.size()));
    }
  }
  if (state.first_moment.size() != params.size()) throw std::invalid_argument("Adam state does not match parameters");

  ++state.step;
  const double bias1 = 1.0 - std::pow(state.beta1, static_cast<double>(state.step));
  const double bias2 = 1.0 - std::pow(state.beta2, static_cast<double>(state.step));
  for (std::size_t k = 0; k < params.size(); ++k) {
    Eigen::Map<Vector> p(params[k].data(), params[k].size());
    Eigen::Map<const Vector> g(grads[k].data(), grads[k].size());
    Vector& m = state.first_moment[k];
    Vector& v = state.second_moment[k];
    if (m.size() != p.size()) throw std::invalid_argument("Adam state does not match parameters");
    m = state.beta1 * m + (1.0 - state.beta1) * g;
    v = state.beta2 * v + (1.0 - state.beta2) * g.cwiseAbs2();
    p.array() -= lr * (m.array() / bias1) / ((v.array() / bias2).sqrt() + state.epsilon);
  }
}

Batch gather_batch(std::span<const Sample> samples, std::span<const std::size_t> indices) {
  std::vector<Sample> chosen;
  chosen.reserve(indices.size());
  for (const auto index : indices) chosen.push_back(samples[index]);
  return make_batch(chosen);
}

}  // namespace

void adam_step(GmnParams& params, const GmnGradients& grads, AdamState& state, double lr) {
  adam_update(params.weights, grads.weights, state, lr);
  apply_support(params);
}

void adam_step(SgmnParams& params, const SgmnGradients& grads, AdamState& state, double lr) {
  adam_update(params.spectral_weights, grads.spectral_weights, state, lr);
}

void adam_step(ModelParams& params, const ModelGradients& grads, AdamState& state, double lr) {
  if (auto* gmn = std::get_if<GmnParams>(&params)) {
    adam_step(*gmn, std::get<GmnGradients>(grads), state, lr);
  } else {
    adam_step(std::get<SgmnParams>(params), std::get<SgmnGradients>(grads), state, lr);
  }
}

PlateauSchedule::PlateauSchedule(const TrainConfig& config)
    : lr_init_(config.lr_init),
      lr_floor_(config.lr_floor),
      lr_patience_(config.lr_patience),
      stop_patience_(config.stop_patience),
      min_delta_(config.min_delta),
      lr_(config.lr_init),
      best_loss_(std::numeric_limits<double>::infinity()) {
  config.validate();
}

PlateauSchedule::Decision PlateauSchedule::observe(double val_loss) {
  Decision decision;
  if (val_loss < best_loss_ - min_delta_) {
    best_loss_ = val_loss;
    lr_wait_ = 0;
    stop_wait_ = 0;
    decision.improved = true;
    return decision;
  }
  ++lr_wait_;
  ++stop_wait_;
  if (lr_wait_ >= lr_patience_) {
    lr_wait_ = 0;
    // lr_init / 10^k exactly, rather than repeated division.
    const double next = lr_init_ / std::pow(10.0, decays_ + 1);
    if (next >= lr_floor_ * (1.0 - 1e-9)) {
      lr_ = next;
      ++decays_;
      decision.lr_decayed = true;
    }
  }
  decision.stop = stop_wait_ >= stop_patience_;
  return decision;
}

double dataset_loss(const ModelParams& params, std::span<const Sample> samples, int batch_size) {
  if (samples.empty()) throw std::invalid_argument("cannot compute loss over an empty dataset");
  double squared = 0.0;
  double count = 0.0;
  for (std::size_t begin = 0; begin < samples.size(); begin += static_cast<std::size_t>(batch_size)) {
    const auto length = std::min<std::size_t>(static_cast<std::size_t>(batch_size), samples.size() - begin);
    const Batch batch = make_batch(samples.subspan(begin, length));
    const Matrix pred = forward(params, batch);
    squared += (pred - batch.labels).cwiseProduct(batch.label_mask).squaredNorm();
    count += batch.label_mask.sum();
  }
  if (count <= 0.0) throw std::invalid_argument("dataset has no observed labels");
  return squared / count;
}

TrainResult train(ModelParams initial, std::span<const Sample> train_samples, std::span<const Sample> val_samples,
                  const TrainConfig& config, const EpochCallback& on_epoch) {
  config.validate();
  if (train_samples.empty()) throw std::invalid_argument("training set is empty");
  if (val_samples.empty()) throw std::invalid_argument("validation set is empty");

  ModelParams params = std::move(initial);
  ModelParams best = params;
  double best_val = std::numeric_limits<double>::infinity();
  AdamState adam;
  PlateauSchedule schedule(config);
  TrainHistory history;

  std::mt19937_64 rng(config.seed);
  std::vector<std::size_t> order(train_samples.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  const auto batch_size = static_cast<std::size_t>(config.batch_size);

  for (int epoch = 1; epoch <= config.max_epochs; ++epoch) {
    const auto started = std::chrono::steady_clock::now();
    std::shuffle(order.begin(), order.end(), rng);
    const double lr = schedule.lr();

    double squared = 0.0;
    double count = 0.0;
    for (std::size_t begin = 0; begin < order.size(); begin += batch_size) {
      const auto length = std::min(batch_size, order.size() - begin);
      const Batch batch = gather_batch(train_samples, std::span(order).subspan(begin, length));
      const double observed = batch.label_mask.sum();
      if (observed <= 0.0) continue;

      const Matrix pred = forward(params, batch);
      const Matrix residual = (pred - batch.labels).cwiseProduct(batch.label_mask);
      const double batch_squared = residual.squaredNorm();
      if (!std::isfinite(batch_squared)) {
        throw std::runtime_error("non-finite training loss at epoch " + std::to_string(epoch));
      }
      const ModelGradients grads = backward(params, batch, (2.0 / observed) * residual);
      adam_step(params, grads, adam, lr);
      squared += batch_squared;
      count += observed;
    }
    if (count <= 0.0) throw std::invalid_argument("training set has no observed labels");

    EpochRecord record;
    record.epoch = epoch;
    record.train_loss = squared / count;
    record.val_loss = dataset_loss(params, val_samples, config.batch_size);
    record.lr = lr;
    if (!std::isfinite(record.val_loss)) {
      throw std::runtime_error("non-finite validation loss at epoch " + std::to_string(epoch));
    }
    const auto decision = schedule.observe(record.val_loss);
    // The schedule's notion of improvement includes min_delta; the returned
    // parameters are simply the lowest validation loss seen.
    if (record.val_loss < best_val) {
      best_val = record.val_loss;
      best = params;
      history.best_epoch = epoch;
    }
    record.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
    history.epochs.push_back(record);
    if (on_epoch) on_epoch(record);
    if (decision.stop) break;
  }
  return {std::move(best), std::move(history)};
}

}  // namespace gmn
