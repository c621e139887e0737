#pragma once

#include "graphmarkov/graph.hpp"

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace gmn {

/// Seconds since the Unix epoch.
using Timestamp = std::int64_t;

inline constexpr Timestamp kDefaultInterval = 300;  // 5 minutes

struct NormStats {
  double min = 0.0;
  double max = 1.0;

  double span() const { return max - min; }
};

/// T x S state matrix with its observation mask.
///
/// Missing entries carry mask 0 and value 0. Timestamps are strictly
/// increasing with a constant interval.
struct StateSeries {
  Matrix values;
  Matrix mask;
  std::vector<Timestamp> timestamps;
  std::optional<NormStats> norm;
  std::vector<std::string> sensor_ids;

  Index steps() const { return values.rows(); }
  Index sensors() const { return values.cols(); }
  Index observed_count() const { return static_cast<Index>(mask.sum()); }
};

/// Validates shape agreement, the zero-fill rule and timestamp spacing.
void check_series(const StateSeries& series);

/// Builds a fully observed series with synthesized timestamps.
StateSeries make_series(Matrix values, Timestamp start = 0, Timestamp interval = kDefaultInterval);

/// Parses the speed CSV layout: optional header row of sensor ids, optional
/// leading ISO-8601 timestamp column, numeric cells. Empty cells, NaN and the
/// literal 0 are treated as missing.
StateSeries parse_series_csv(std::istream& in);
StateSeries ingest_csv(const std::filesystem::path& path);

/// Writes header + timestamp column + values, `%.17g`, missing cells empty.
void write_series_csv(std::ostream& out, const StateSeries& series);

/// Parses "YYYY-MM-DD[ T]HH:MM[:SS][Z]". Returns nullopt on anything else.
std::optional<Timestamp> parse_iso8601(const std::string& text);
std::string format_iso8601(Timestamp t);

/// Hides a uniformly random fraction `rate` of the observed entries.
StateSeries inject_missing(const StateSeries& series, double rate, std::uint64_t seed);

/// Maps observed values to (v - min) / (max - min). When `stats` is absent
/// they are computed from the observed entries of `series`.
std::pair<StateSeries, NormStats> normalize(const StateSeries& series,
                                            std::optional<NormStats> stats = std::nullopt);

Matrix denormalize(const Matrix& values, const NormStats& stats);
double denormalize(double value, const NormStats& stats);
/// Inverse of normalize on a series; throws if the series has no stats.
StateSeries denormalize(const StateSeries& series);

struct SplitSpec {
  double train = 0.6;
  double val = 0.2;
  double test = 0.2;

  /// Parses "A:B:C" with positive weights, normalized to sum to one.
  static SplitSpec parse(const std::string& text);
  void validate() const;
};

struct SeriesSplit {
  StateSeries train;
  StateSeries val;
  StateSeries test;
};

/// Contiguous train/val/test partition; boundaries are floor(fraction * T)
/// and the remainder goes to the test part. Each part must have at least
/// `min_part_steps` rows.
SeriesSplit split(const StateSeries& series, const SplitSpec& spec, Index min_part_steps = 1);

/// One training window: n input rows (oldest first) and the next row as label.
struct Sample {
  Matrix inputs;      // n x S
  Matrix input_mask;  // n x S
  Vector label;       // S
  Vector label_mask;  // S
  Timestamp label_time = 0;

  int history() const { return static_cast<int>(inputs.rows()); }
  Index sensors() const { return inputs.cols(); }
};

/// T - n samples; sample k uses rows k..k+n-1 as inputs and row k+n as label.
std::vector<Sample> window(const StateSeries& series, int n);

/// As above, but inputs come from `inputs` and labels from `labels`. Used to
/// keep injected missingness out of the labels.
std::vector<Sample> window(const StateSeries& inputs, const StateSeries& labels, int n);

}  // namespace gmn
