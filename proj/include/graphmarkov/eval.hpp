#pragma once

#include "graphmarkov/models.hpp"
#include "graphmarkov/series.hpp"

#include <span>
#include <string>
#include <vector>

namespace gmn {

/// Error metrics in original units. MAPE is a percentage over entries whose
/// denormalized truth exceeds 1e-6 in magnitude; it is NaN when no such
/// entry exists.
struct MetricsReport {
  double mae = 0.0;
  double mape = 0.0;
  double rmse = 0.0;
  long long evaluated_count = 0;
  long long excluded_zero_truth_count = 0;
};

inline constexpr double kMapeZeroThreshold = 1e-6;

/// `pred` and `truth` are normalized M x S matrices; both are denormalized
/// with `stats` before scoring entries where `truth_mask` is 1.
MetricsReport metrics(const Matrix& pred, const Matrix& truth, const Matrix& truth_mask, const NormStats& stats);

/// Normalized model predictions for every sample, M x S.
Matrix predict(const ModelParams& params, std::span<const Sample> samples, int batch_size = 64);

MetricsReport evaluate(const ModelParams& params, std::span<const Sample> samples, const NormStats& stats,
                       int batch_size = 64);

/// Last observed input value per sensor, scanning newest to oldest; 0 when
/// the whole window is missing.
Matrix persistence_predict(std::span<const Sample> samples);
MetricsReport persistence_baseline(std::span<const Sample> samples, const NormStats& stats);

/// Label rows and masks stacked as M x S.
Matrix stack_labels(std::span<const Sample> samples);
Matrix stack_label_masks(std::span<const Sample> samples);
std::vector<Timestamp> label_times(std::span<const Sample> samples);

enum class Grouping { hour, weekday };

Grouping parse_grouping(const std::string& text);
std::string to_string(Grouping grouping);

/// Hour of day 0..23 or weekday 0..6 (0 = Monday) of a UTC timestamp.
int group_key(Timestamp t, Grouping grouping);

struct ResidualGroup {
  int key = 0;
  long long count = 0;
  double mean = 0.0;
  double stddev = 0.0;  // sample standard deviation, 0 for a single entry
  double q1 = 0.0;
  double median = 0.0;
  double q3 = 0.0;
};

/// One group per key (24 hours or 7 weekdays), including empty ones.
struct ResidualSummary {
  Grouping grouping = Grouping::hour;
  std::vector<ResidualGroup> groups;
};

/// Residual truth - pred over observed entries, grouped by the timestamp of
/// each row. Inputs are in whatever units the caller wants reported.
ResidualSummary residual_summary(const Matrix& pred, const Matrix& truth, const Matrix& truth_mask,
                                 std::span<const Timestamp> timestamps, Grouping grouping);

enum class InfluenceMode { row, column };

InfluenceMode parse_influence_mode(const std::string& text);
std::string to_string(InfluenceMode mode);

/// Per-vertex mean of squared entries of the effective weight of step k.
struct InfluenceTable {
  int step = 1;
  InfluenceMode mode = InfluenceMode::row;
  Vector scores;
  std::vector<int> ranks;           // ranks[v] in 1..S, 1 = most influential
  std::vector<Index> ranked_order;  // vertices sorted by rank

  Index size() const { return scores.size(); }
};

/// Ties rank by ascending vertex index.
InfluenceTable influence_scores(const ModelParams& params, int k, InfluenceMode mode = InfluenceMode::row);

}  // namespace gmn
