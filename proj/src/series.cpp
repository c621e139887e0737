#include "graphmarkov/series.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <limits>
#include <ostream>
#include <random>
#include <sstream>
#include <stdexcept>

namespace gmn {

namespace {

std::string trim(std::string_view text) {
  const auto first = text.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = text.find_last_not_of(" \t\r\n");
  return std::string(text.substr(first, last - first + 1));
}

std::vector<std::string> split_line(const std::string& line) {
  std::vector<std::string> cells;
  std::size_t start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    if (comma == std::string::npos) {
      cells.push_back(trim(std::string_view(line).substr(start)));
      break;
    }
    cells.push_back(trim(std::string_view(line).substr(start, comma - start)));
    start = comma + 1;
  }
  return cells;
}

std::optional<double> parse_double(const std::string& text) {
  if (text.empty()) return std::nullopt;
  const char* begin = text.data();
  const char* end = text.data() + text.size();
  if (*begin == '+') ++begin;
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(begin, end, value);
  if (ec != std::errc() || ptr != end) return std::nullopt;
  return value;
}

bool parse_int(std::string_view text, int& out) {
  if (text.empty()) return false;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), out);
  return ec == std::errc() && ptr == text.data() + text.size();
}

double unit_uniform(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

}  // namespace

std::optional<Timestamp> parse_iso8601(const std::string& raw) {
  std::string text = trim(raw);
  if (!text.empty() && (text.back() == 'Z' || text.back() == 'z')) text.pop_back();
  if (text.size() < 10 || text[4] != '-' || text[7] != '-') return std::nullopt;

  int year = 0, month = 0, day = 0, hour = 0, minute = 0, second = 0;
  const std::string_view view(text);
  if (!parse_int(view.substr(0, 4), year) || !parse_int(view.substr(5, 2), month) ||
      !parse_int(view.substr(8, 2), day)) {
    return std::nullopt;
  }
  if (text.size() > 10) {
    if (text[10] != ' ' && text[10] != 'T') return std::nullopt;
    const std::string_view clock = view.substr(11);
    if (clock.size() < 5 || clock[2] != ':') return std::nullopt;
    if (!parse_int(clock.substr(0, 2), hour) || !parse_int(clock.substr(3, 2), minute)) {
      return std::nullopt;
    }
    if (clock.size() > 5) {
      if (clock[5] != ':' || clock.size() < 8) return std::nullopt;
      if (!parse_int(clock.substr(6, 2), second)) return std::nullopt;
      // Fractional seconds are truncated.
      if (clock.size() > 8 && clock[8] != '.') return std::nullopt;
    }
  }
  using namespace std::chrono;
  const year_month_day ymd{std::chrono::year{year}, std::chrono::month{static_cast<unsigned>(month)},
                           std::chrono::day{static_cast<unsigned>(day)}};
  if (!ymd.ok() || hour > 23 || minute > 59 || second > 60) return std::nullopt;
  const auto days_since_epoch = sys_days{ymd}.time_since_epoch().count();
  return static_cast<Timestamp>(days_since_epoch) * 86400 + hour * 3600 + minute * 60 + second;
}

std::string format_iso8601(Timestamp t) {
  using namespace std::chrono;
  const Timestamp days = (t >= 0 ? t : t - 86399) / 86400;
  const Timestamp secs = t - days * 86400;
  const year_month_day ymd{sys_days{std::chrono::days{days}}};
  char buffer[64];
  std::snprintf(buffer, sizeof(buffer), "%04d-%02u-%02u %02lld:%02lld:%02lld", static_cast<int>(ymd.year()),
                static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()),
                static_cast<long long>(secs / 3600), static_cast<long long>((secs / 60) % 60),
                static_cast<long long>(secs % 60));
  return buffer;
}

void check_series(const StateSeries& series) {
  if (series.values.rows() != series.mask.rows() || series.values.cols() != series.mask.cols()) {
    throw std::invalid_argument("series values and mask shapes differ");
  }
  if (static_cast<Index>(series.timestamps.size()) != series.steps()) {
    throw std::invalid_argument("series has " + std::to_string(series.timestamps.size()) +
                                " timestamps for " + std::to_string(series.steps()) + " steps");
  }
  if (!((series.mask.array() == 0.0) || (series.mask.array() == 1.0)).all()) {
    throw std::invalid_argument("series mask must be binary");
  }
  if (((series.mask.array() == 0.0) && (series.values.array() != 0.0)).any()) {
    throw std::invalid_argument("series has nonzero values at missing positions");
  }
  if (series.timestamps.size() >= 2) {
    const Timestamp interval = series.timestamps[1] - series.timestamps[0];
    for (std::size_t t = 1; t < series.timestamps.size(); ++t) {
      const Timestamp step = series.timestamps[t] - series.timestamps[t - 1];
      if (step <= 0) {
        throw std::invalid_argument("timestamps are not strictly increasing at row " + std::to_string(t));
      }
      if (step != interval) {
        throw std::invalid_argument("timestamps are not evenly spaced at row " + std::to_string(t));
      }
    }
  }
}

StateSeries make_series(Matrix values, Timestamp start, Timestamp interval) {
  StateSeries series;
  series.mask = Matrix::Ones(values.rows(), values.cols());
  series.values = std::move(values);
  series.timestamps.resize(static_cast<std::size_t>(series.values.rows()));
  for (std::size_t t = 0; t < series.timestamps.size(); ++t) {
    series.timestamps[t] = start + static_cast<Timestamp>(t) * interval;
  }
  return series;
}

StateSeries parse_series_csv(std::istream& in) {
  std::vector<std::vector<std::string>> rows;
  std::vector<std::size_t> line_numbers;
  std::string line;
  std::size_t line_number = 0;
  while (std::getline(in, line)) {
    ++line_number;
    if (trim(line).empty()) continue;
    rows.push_back(split_line(line));
    line_numbers.push_back(line_number);
  }
  if (rows.empty()) throw std::invalid_argument("speed CSV is empty");

  const std::size_t width = rows.front().size();
  for (std::size_t r = 1; r < rows.size(); ++r) {
    if (rows[r].size() != width) {
      throw std::invalid_argument("ragged row at line " + std::to_string(line_numbers[r]) + ": expected " +
                                  std::to_string(width) + " cells, got " + std::to_string(rows[r].size()));
    }
  }

  const auto& probe = rows.size() >= 2 ? rows[1] : rows[0];
  const bool has_time_column = width >= 2 && parse_iso8601(probe[0]).has_value();
  bool has_header = false;
  if (has_time_column && !parse_iso8601(rows[0][0])) has_header = true;
  for (std::size_t c = has_time_column ? 1 : 0; c < width && !has_header; ++c) {
    const auto& cell = rows[0][c];
    if (!cell.empty() && !parse_double(cell)) has_header = true;
  }

  const std::size_t first_col = has_time_column ? 1 : 0;
  const std::size_t first_row = has_header ? 1 : 0;
  const Index steps = static_cast<Index>(rows.size() - first_row);
  const Index sensors = static_cast<Index>(width - first_col);
  if (steps == 0 || sensors == 0) throw std::invalid_argument("speed CSV has no data cells");

  StateSeries series;
  series.values = Matrix::Zero(steps, sensors);
  series.mask = Matrix::Zero(steps, sensors);
  if (has_header) {
    series.sensor_ids.assign(rows[0].begin() + static_cast<std::ptrdiff_t>(first_col), rows[0].end());
  }
  for (Index t = 0; t < steps; ++t) {
    const auto& row = rows[static_cast<std::size_t>(t) + first_row];
    const auto number = line_numbers[static_cast<std::size_t>(t) + first_row];
    if (has_time_column) {
      const auto stamp = parse_iso8601(row[0]);
      if (!stamp) {
        throw std::invalid_argument("unparseable timestamp '" + row[0] + "' at line " + std::to_string(number));
      }
      series.timestamps.push_back(*stamp);
    }
    for (Index s = 0; s < sensors; ++s) {
      const auto& cell = row[static_cast<std::size_t>(s) + first_col];
      if (cell.empty()) continue;
      const auto value = parse_double(cell);
      if (!value) {
        throw std::invalid_argument("unparseable value '" + cell + "' at line " + std::to_string(number) +
                                    ", column " + std::to_string(s + static_cast<Index>(first_col) + 1));
      }
      if (std::isnan(*value) || *value == 0.0) continue;
      if (!std::isfinite(*value)) {
        throw std::invalid_argument("infinite value at line " + std::to_string(number));
      }
      series.values(t, s) = *value;
      series.mask(t, s) = 1.0;
    }
  }
  if (!has_time_column) {
    series.timestamps.resize(static_cast<std::size_t>(steps));
    for (Index t = 0; t < steps; ++t) {
      series.timestamps[static_cast<std::size_t>(t)] = static_cast<Timestamp>(t) * kDefaultInterval;
    }
  }
  check_series(series);
  return series;
}

StateSeries ingest_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open speed file " + path.string());
  return parse_series_csv(in);
}

void write_series_csv(std::ostream& out, const StateSeries& series) {
  out << "timestamp";
  for (Index s = 0; s < series.sensors(); ++s) {
    out << ',';
    if (static_cast<Index>(series.sensor_ids.size()) == series.sensors()) {
      out << series.sensor_ids[static_cast<std::size_t>(s)];
    } else {
      out << 's' << s;
    }
  }
  out << '\n';
  char buffer[32];
  for (Index t = 0; t < series.steps(); ++t) {
    out << format_iso8601(series.timestamps[static_cast<std::size_t>(t)]);
    for (Index s = 0; s < series.sensors(); ++s) {
      out << ',';
      if (series.mask(t, s) != 0.0) {
        std::snprintf(buffer, sizeof(buffer), "%.17g", series.values(t, s));
        out << buffer;
      }
    }
    out << '\n';
  }
}

StateSeries inject_missing(const StateSeries& series, double rate, std::uint64_t seed) {
  if (!(rate >= 0.0 && rate < 1.0)) {
    throw std::invalid_argument("missing rate must lie in [0, 1), got " + std::to_string(rate));
  }
  StateSeries out = series;
  if (rate == 0.0) return out;
  std::mt19937_64 rng(seed);
  for (Index t = 0; t < out.steps(); ++t) {
    for (Index s = 0; s < out.sensors(); ++s) {
      if (out.mask(t, s) == 0.0) continue;
      if (unit_uniform(rng) < rate) {
        out.mask(t, s) = 0.0;
        out.values(t, s) = 0.0;
      }
    }
  }
  return out;
}

std::pair<StateSeries, NormStats> normalize(const StateSeries& series, std::optional<NormStats> stats) {
  if (!stats) {
    double lo = std::numeric_limits<double>::infinity();
    double hi = -std::numeric_limits<double>::infinity();
    for (Index t = 0; t < series.steps(); ++t) {
      for (Index s = 0; s < series.sensors(); ++s) {
        if (series.mask(t, s) == 0.0) continue;
        lo = std::min(lo, series.values(t, s));
        hi = std::max(hi, series.values(t, s));
      }
    }
    if (!(lo <= hi)) throw std::invalid_argument("cannot normalize a series with no observed entries");
    stats = NormStats{lo, hi};
  }
  if (!(stats->max > stats->min)) {
    throw std::invalid_argument("cannot normalize a constant series (min == max)");
  }
  StateSeries out = series;
  const double span = stats->span();
  out.values = ((series.values.array() - stats->min) / span * series.mask.array()).matrix();
  out.norm = *stats;
  return {std::move(out), *stats};
}

Matrix denormalize(const Matrix& values, const NormStats& stats) {
  return (values.array() * stats.span() + stats.min).matrix();
}

double denormalize(double value, const NormStats& stats) { return value * stats.span() + stats.min; }

StateSeries denormalize(const StateSeries& series) {
  if (!series.norm) throw std::invalid_argument("series has no normalization statistics");
  StateSeries out = series;
  out.values = (denormalize(series.values, *series.norm).array() * series.mask.array()).matrix();
  out.norm.reset();
  return out;
}

SplitSpec SplitSpec::parse(const std::string& text) {
  std::vector<double> parts;
  std::stringstream stream(text);
  std::string token;
  while (std::getline(stream, token, ':')) {
    const auto value = parse_double(trim(token));
    if (!value) throw std::invalid_argument("invalid split '" + text + "'; expected A:B:C");
    parts.push_back(*value);
  }
  if (parts.size() != 3) throw std::invalid_argument("invalid split '" + text + "'; expected A:B:C");
  const double total = parts[0] + parts[1] + parts[2];
  if (!(parts[0] > 0 && parts[1] > 0 && parts[2] > 0)) {
    throw std::invalid_argument("split weights must be positive: '" + text + "'");
  }
  SplitSpec spec{parts[0] / total, parts[1] / total, parts[2] / total};
  spec.validate();
  return spec;
}

void SplitSpec::validate() const {
  const auto in_unit = [](double f) { return f > 0.0 && f < 1.0; };
  if (!in_unit(train) || !in_unit(val) || !in_unit(test) || std::abs(train + val + test - 1.0) > 1e-9) {
    throw std::invalid_argument("split fractions must lie in (0, 1) and sum to 1");
  }
}

namespace {

StateSeries slice(const StateSeries& series, Index begin, Index end) {
  StateSeries part;
  part.values = series.values.middleRows(begin, end - begin);
  part.mask = series.mask.middleRows(begin, end - begin);
  part.timestamps.assign(series.timestamps.begin() + begin, series.timestamps.begin() + end);
  part.norm = series.norm;
  part.sensor_ids = series.sensor_ids;
  return part;
}

}  // namespace

SeriesSplit split(const StateSeries& series, const SplitSpec& spec, Index min_part_steps) {
  spec.validate();
  const Index steps = series.steps();
  // The epsilon absorbs representation error, e.g. 0.6 * 10 = 5.999...
  const auto boundary = [&](double fraction) {
    return static_cast<Index>(std::floor(fraction * static_cast<double>(steps) + 1e-9));
  };
  const Index train_end = boundary(spec.train);
  const Index val_end = std::max(train_end, boundary(spec.train + spec.val));
  const Index lengths[3] = {train_end, val_end - train_end, steps - val_end};
  for (const Index length : lengths) {
    if (length < min_part_steps) {
      throw std::invalid_argument("series too short to split: " + std::to_string(steps) +
                                  " steps give parts of " + std::to_string(lengths[0]) + "/" +
                                  std::to_string(lengths[1]) + "/" + std::to_string(lengths[2]) +
                                  ", need at least " + std::to_string(min_part_steps) + " each");
    }
  }
  return {slice(series, 0, train_end), slice(series, train_end, val_end), slice(series, val_end, steps)};
}

std::vector<Sample> window(const StateSeries& series, int n) { return window(series, series, n); }

std::vector<Sample> window(const StateSeries& inputs, const StateSeries& labels, int n) {
  if (n < 1) throw std::invalid_argument("window length must be >= 1, got " + std::to_string(n));
  if (inputs.steps() != labels.steps() || inputs.sensors() != labels.sensors()) {
    throw std::invalid_argument("input and label series shapes differ");
  }
  const Index steps = inputs.steps();
  if (steps < n + 1) {
    throw std::invalid_argument("series of " + std::to_string(steps) + " steps is too short for n = " +
                                std::to_string(n));
  }
  std::vector<Sample> samples;
  samples.reserve(static_cast<std::size_t>(steps - n));
  for (Index k = 0; k + n < steps; ++k) {
    Sample sample;
    sample.inputs = inputs.values.middleRows(k, n);
    sample.input_mask = inputs.mask.middleRows(k, n);
    sample.label = labels.values.row(k + n).transpose();
    sample.label_mask = labels.mask.row(k + n).transpose();
    sample.label_time = labels.timestamps.empty() ? 0 : labels.timestamps[static_cast<std::size_t>(k + n)];
    samples.push_back(std::move(sample));
  }
  return samples;
}

}  // namespace gmn
