#include "graphmarkov/eval.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace gmn {

MetricsReport metrics(const Matrix& pred, const Matrix& truth, const Matrix& truth_mask, const NormStats& stats) {
  if (pred.rows() != truth.rows() || pred.cols() != truth.cols() || truth_mask.rows() != truth.rows() ||
      truth_mask.cols() != truth.cols()) {
    throw std::invalid_argument("metrics operands have mismatched shapes");
  }
  MetricsReport report;
  double abs_sum = 0.0;
  double sq_sum = 0.0;
  double pct_sum = 0.0;
  long long pct_count = 0;
  for (Index i = 0; i < truth.rows(); ++i) {
    for (Index j = 0; j < truth.cols(); ++j) {
      if (truth_mask(i, j) == 0.0) continue;
      const double y = denormalize(truth(i, j), stats);
      const double y_hat = denormalize(pred(i, j), stats);
      const double error = y - y_hat;
      abs_sum += std::abs(error);
      sq_sum += error * error;
      ++report.evaluated_count;
      if (std::abs(y) > kMapeZeroThreshold) {
        pct_sum += std::abs(error / y);
        ++pct_count;
      } else {
        ++report.excluded_zero_truth_count;
      }
    }
  }
  if (report.evaluated_count == 0) throw std::invalid_argument("no observed entries to evaluate");
  const auto n = static_cast<double>(report.evaluated_count);
  report.mae = abs_sum / n;
  report.rmse = std::sqrt(sq_sum / n);
  report.mape = pct_count > 0 ? 100.0 * pct_sum / static_cast<double>(pct_count)
                              : std::numeric_limits<double>::quiet_NaN();
  return report;
}

Matrix predict(const ModelParams& params, std::span<const Sample> samples, int batch_size) {
  if (samples.empty()) throw std::invalid_argument("cannot predict on an empty sample set");
  if (batch_size < 1) throw std::invalid_argument("batch size must be >= 1");
  Matrix out(static_cast<Index>(samples.size()), sensors_of(params));
  for (std::size_t begin = 0; begin < samples.size(); begin += static_cast<std::size_t>(batch_size)) {
    const auto length = std::min<std::size_t>(static_cast<std::size_t>(batch_size), samples.size() - begin);
    const Batch batch = make_batch(samples.subspan(begin, length));
    out.middleRows(static_cast<Index>(begin), static_cast<Index>(length)) = forward(params, batch);
  }
  return out;
}

Matrix stack_labels(std::span<const Sample> samples) {
  if (samples.empty()) return {};
  Matrix out(static_cast<Index>(samples.size()), samples.front().sensors());
  for (std::size_t i = 0; i < samples.size(); ++i) out.row(static_cast<Index>(i)) = samples[i].label.transpose();
  return out;
}

Matrix stack_label_masks(std::span<const Sample> samples) {
  if (samples.empty()) return {};
  Matrix out(static_cast<Index>(samples.size()), samples.front().sensors());
  for (std::size_t i = 0; i < samples.size(); ++i) {
    out.row(static_cast<Index>(i)) = samples[i].label_mask.transpose();
  }
  return out;
}

std::vector<Timestamp> label_times(std::span<const Sample> samples) {
  std::vector<Timestamp> times;
  times.reserve(samples.size());
  for (const auto& sample : samples) times.push_back(sample.label_time);
  return times;
}

MetricsReport evaluate(const ModelParams& params, std::span<const Sample> samples, const NormStats& stats,
                       int batch_size) {
  if (samples.empty()) throw std::invalid_argument("test set is empty");
  return metrics(predict(params, samples, batch_size), stack_labels(samples), stack_label_masks(samples), stats);
}

Matrix persistence_predict(std::span<const Sample> samples) {
  if (samples.empty()) throw std::invalid_argument("test set is empty");
  Matrix out = Matrix::Zero(static_cast<Index>(samples.size()), samples.front().sensors());
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const Sample& sample = samples[i];
    for (Index s = 0; s < sample.sensors(); ++s) {
      for (Index step = sample.inputs.rows() - 1; step >= 0; --step) {
        if (sample.input_mask(step, s) != 0.0) {
          out(static_cast<Index>(i), s) = sample.inputs(step, s);
          break;
        }
      }
    }
  }
  return out;
}

MetricsReport persistence_baseline(std::span<const Sample> samples, const NormStats& stats) {
  return metrics(persistence_predict(samples), stack_labels(samples), stack_label_masks(samples), stats);
}

Grouping parse_grouping(const std::string& text) {
  if (text == "hour") return Grouping::hour;
  if (text == "weekday") return Grouping::weekday;
  throw std::invalid_argument("unknown residual grouping '" + text + "' (expected hour or weekday)");
}

std::string to_string(Grouping grouping) { return grouping == Grouping::hour ? "hour" : "weekday"; }

int group_key(Timestamp t, Grouping grouping) {
  const Timestamp days = (t >= 0 ? t : t - 86399) / 86400;
  if (grouping == Grouping::hour) return static_cast<int>((t - days * 86400) / 3600);
  // 1970-01-01 was a Thursday (3 with Monday = 0).
  return static_cast<int>(((days + 3) % 7 + 7) % 7);
}

namespace {

double quantile(const std::vector<double>& sorted, double p) {
  const double position = p * static_cast<double>(sorted.size() - 1);
  const auto lower = static_cast<std::size_t>(std::floor(position));
  const auto upper = std::min(lower + 1, sorted.size() - 1);
  const double fraction = position - static_cast<double>(lower);
  return sorted[lower] + fraction * (sorted[upper] - sorted[lower]);
}

}  // namespace

ResidualSummary residual_summary(const Matrix& pred, const Matrix& truth, const Matrix& truth_mask,
                                 std::span<const Timestamp> timestamps, Grouping grouping) {
  if (pred.rows() != truth.rows() || pred.cols() != truth.cols() || truth_mask.rows() != truth.rows() ||
      truth_mask.cols() != truth.cols()) {
    throw std::invalid_argument("residual operands have mismatched shapes");
  }
  if (static_cast<Index>(timestamps.size()) != truth.rows()) {
    throw std::invalid_argument("got " + std::to_string(timestamps.size()) + " timestamps for " +
                                std::to_string(truth.rows()) + " prediction rows");
  }
  const int group_count = grouping == Grouping::hour ? 24 : 7;
  std::vector<std::vector<double>> buckets(static_cast<std::size_t>(group_count));
  for (Index i = 0; i < truth.rows(); ++i) {
    auto& bucket = buckets[static_cast<std::size_t>(group_key(timestamps[static_cast<std::size_t>(i)], grouping))];
    for (Index j = 0; j < truth.cols(); ++j) {
      if (truth_mask(i, j) != 0.0) bucket.push_back(truth(i, j) - pred(i, j));
    }
  }

  ResidualSummary summary;
  summary.grouping = grouping;
  for (int key = 0; key < group_count; ++key) {
    auto& values = buckets[static_cast<std::size_t>(key)];
    ResidualGroup group;
    group.key = key;
    group.count = static_cast<long long>(values.size());
    if (!values.empty()) {
      const double n = static_cast<double>(values.size());
      group.mean = std::accumulate(values.begin(), values.end(), 0.0) / n;
      if (values.size() > 1) {
        double ss = 0.0;
        for (const double v : values) ss += (v - group.mean) * (v - group.mean);
        group.stddev = std::sqrt(ss / (n - 1.0));
      }
      std::sort(values.begin(), values.end());
      group.q1 = quantile(values, 0.25);
      group.median = quantile(values, 0.5);
      group.q3 = quantile(values, 0.75);
    } else {
      const double nan = std::numeric_limits<double>::quiet_NaN();
      group.mean = group.stddev = group.q1 = group.median = group.q3 = nan;
    }
    summary.groups.push_back(group);
  }
  return summary;
}

InfluenceMode parse_influence_mode(const std::string& text) {
  if (text == "row") return InfluenceMode::row;
  if (text == "column") return InfluenceMode::column;
  throw std::invalid_argument("unknown influence mode '" + text + "' (expected row or column)");
}

std::string to_string(InfluenceMode mode) { return mode == InfluenceMode::row ? "row" : "column"; }

InfluenceTable influence_scores(const ModelParams& params, int k, InfluenceMode mode) {
  const int n = history_of(params);
  if (k < 1 || k > n) {
    throw std::out_of_range("step index k = " + std::to_string(k) + " outside 1.." + std::to_string(n));
  }
  const Matrix h = effective_weight(params, k);
  const auto size = static_cast<double>(h.rows());

  InfluenceTable table;
  table.step = k;
  table.mode = mode;
  table.scores = mode == InfluenceMode::row ? Vector(h.cwiseAbs2().rowwise().sum() / size)
                                            : Vector(h.cwiseAbs2().colwise().sum().transpose() / size);
  table.ranked_order.resize(static_cast<std::size_t>(table.size()));
  std::iota(table.ranked_order.begin(), table.ranked_order.end(), Index{0});
  std::stable_sort(table.ranked_order.begin(), table.ranked_order.end(),
                   [&](Index a, Index b) { return table.scores(a) > table.scores(b); });
  table.ranks.assign(static_cast<std::size_t>(table.size()), 0);
  for (std::size_t r = 0; r < table.ranked_order.size(); ++r) {
    table.ranks[static_cast<std::size_t>(table.ranked_order[r])] = static_cast<int>(r + 1);
  }
  return table;
}

}  // namespace gmn
