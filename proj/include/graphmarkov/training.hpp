#pragma once

#include "graphmarkov/models.hpp"

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

namespace gmn {

struct TrainConfig {
  int batch_size = 64;
  double lr_init = 1e-3;
  double lr_floor = 1e-5;
  int lr_patience = 4;
  int stop_patience = 5;
  double min_delta = 1e-5;
  int max_epochs = 200;
  std::uint64_t seed = 0;

  void validate() const;
};

/// Mean squared error over entries whose label mask is 1.
double masked_mse(const Matrix& pred, const Matrix& label, const Matrix& label_mask);

struct AdamState {
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  long long step = 0;
  std::vector<Vector> first_moment;
  std::vector<Vector> second_moment;
};

/// One bias-corrected Adam update. GMN weights are re-masked to their hop
/// support afterwards. Throws std::runtime_error on non-finite gradients.
void adam_step(GmnParams& params, const GmnGradients& grads, AdamState& state, double lr);
void adam_step(SgmnParams& params, const SgmnGradients& grads, AdamState& state, double lr);
void adam_step(ModelParams& params, const ModelGradients& grads, AdamState& state, double lr);

/// Validation-driven learning-rate decay and early stopping.
///
/// An epoch improves when its loss beats the best loss so far by more than
/// `min_delta`. After `lr_patience` consecutive non-improving epochs the rate
/// drops tenfold (never below the floor) and that counter restarts; after
/// `stop_patience` consecutive non-improving epochs training stops.
class PlateauSchedule {
 public:
  struct Decision {
    bool improved = false;
    bool lr_decayed = false;
    bool stop = false;
  };

  explicit PlateauSchedule(const TrainConfig& config);

  Decision observe(double val_loss);
  double lr() const { return lr_; }
  double best_loss() const { return best_loss_; }

 private:
  double lr_init_;
  double lr_floor_;
  int lr_patience_;
  int stop_patience_;
  double min_delta_;
  double lr_;
  int decays_ = 0;
  double best_loss_;
  int lr_wait_ = 0;
  int stop_wait_ = 0;
};

struct EpochRecord {
  int epoch = 0;
  double train_loss = 0.0;
  double val_loss = 0.0;
  double lr = 0.0;
  double seconds = 0.0;
};

struct TrainHistory {
  std::vector<EpochRecord> epochs;
  int best_epoch = 0;
};

struct TrainResult {
  ModelParams params;
  TrainHistory history;
};

/// Masked MSE of `params` over `samples`, evaluated in batches.
double dataset_loss(const ModelParams& params, std::span<const Sample> samples, int batch_size = 64);

using EpochCallback = std::function<void(const EpochRecord&)>;

/// Mini-batch Adam training from `initial`, returning the parameters of the
/// best validation epoch.
TrainResult train(ModelParams initial, std::span<const Sample> train_samples, std::span<const Sample> val_samples,
                  const TrainConfig& config, const EpochCallback& on_epoch = {});

}  // namespace gmn
