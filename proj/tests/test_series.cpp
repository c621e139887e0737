#include "oracles.hpp"

#include <doctest.h>

#include <cmath>
#include <random>
#include <sstream>
#include <stdexcept>

using namespace gmn;

namespace {

StateSeries parse(const std::string& text) {
  std::istringstream in(text);
  return parse_series_csv(in);
}

bool zero_filled(const StateSeries& s) {
  return (s.values.array() * (1.0 - s.mask.array())).cwiseAbs().maxCoeff() == 0.0;
}

Matrix ramp(Index steps, Index sensors) {
  Matrix m(steps, sensors);
  for (Index t = 0; t < steps; ++t) {
    for (Index s = 0; s < sensors; ++s) m(t, s) = 1.0 + static_cast<double>(t * sensors + s);
  }
  return m;
}

}  // namespace

TEST_CASE("csv ingestion marks empty cells as missing") {
  const StateSeries s = parse("1,2\n3,\n5,6\n");
  CHECK(s.steps() == 3);
  CHECK(s.sensors() == 2);
  CHECK(s.mask.sum() == 5.0);
  CHECK(s.mask(1, 1) == 0.0);
  CHECK(zero_filled(s));
  CHECK(s.timestamps[1] - s.timestamps[0] == kDefaultInterval);
}

TEST_CASE("csv ingestion sniffs header and timestamp column") {
  const StateSeries s = parse(
      "time,a,b\n"
      "2012-03-01 00:00:00,64.5,NaN\n"
      "2012-03-01 00:05:00,0,61\n");
  CHECK(s.sensor_ids == std::vector<std::string>{"a", "b"});
  CHECK(s.mask(0, 1) == 0.0);
  CHECK(s.mask(1, 0) == 0.0);
  CHECK(s.values(0, 0) == 64.5);
  CHECK(format_iso8601(s.timestamps[0]) == "2012-03-01 00:00:00");
  CHECK(s.timestamps[1] - s.timestamps[0] == 300);

  const StateSeries numeric_header = parse("773869,767541\n60,61\n62,63\n");
  CHECK(numeric_header.steps() == 3);
  const StateSeries full = parse("60,61\n62,63\n");
  CHECK(full.mask == Matrix::Ones(2, 2));
}

TEST_CASE("csv ingestion errors") {
  CHECK_THROWS_AS(parse("1,2,3\n1,2,3,4\n"), std::invalid_argument);
  CHECK_THROWS_AS(parse(""), std::invalid_argument);
  CHECK_THROWS_AS(parse("1,2\n3,x\n"), std::invalid_argument);
  CHECK_THROWS_AS(parse("t,a\n2012-03-01 00:00,1\n2012-03-01 00:05,2\n2012-03-01 00:15,3\n"),
                  std::invalid_argument);
  CHECK_THROWS_AS(ingest_csv("/nonexistent/speed.csv"), std::invalid_argument);
}

TEST_CASE("csv round trip is exact") {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> unit(0.5, 80.0);
  Matrix values(20, 4);
  for (Index t = 0; t < 20; ++t) {
    for (Index s = 0; s < 4; ++s) values(t, s) = unit(rng);
  }
  StateSeries series = inject_missing(make_series(values, 1331164800), 0.2, 4);
  std::ostringstream out;
  write_series_csv(out, series);
  const StateSeries back = parse(out.str());
  CHECK(back.values == series.values);
  CHECK(back.mask == series.mask);
  CHECK(back.timestamps == series.timestamps);
}

TEST_CASE("iso8601") {
  CHECK(parse_iso8601("1970-01-01 00:00:00") == Timestamp{0});
  CHECK(parse_iso8601("2012-03-01T00:05Z") == Timestamp{1330560300});
  CHECK_FALSE(parse_iso8601("2012-13-01 00:00:00"));
  CHECK_FALSE(parse_iso8601("12.5"));
  CHECK(format_iso8601(1330560300) == "2012-03-01 00:05:00");
}

TEST_CASE("inject_missing") {
  const StateSeries base = make_series(ramp(100, 10));
  CHECK(inject_missing(base, 0.0, 9).mask == base.mask);

  const StateSeries a = inject_missing(base, 0.2, 9);
  const StateSeries b = inject_missing(base, 0.2, 9);
  CHECK(a.mask == b.mask);
  CHECK(a.observed_count() >= 760);
  CHECK(a.observed_count() <= 840);
  CHECK(zero_filled(a));
  CHECK(inject_missing(base, 0.2, 10).mask != a.mask);

  // Never resurrects: a second pass only removes entries.
  const StateSeries c = inject_missing(a, 0.5, 3);
  CHECK(((c.mask.array() > a.mask.array())).count() == 0);

  CHECK_THROWS_AS(inject_missing(base, 1.0, 0), std::invalid_argument);
  CHECK_THROWS_AS(inject_missing(base, -0.1, 0), std::invalid_argument);
}

TEST_CASE("normalize and denormalize") {
  Matrix v(2, 1);
  v << 20, 70;
  const auto [norm, stats] = normalize(make_series(v));
  CHECK(stats.min == 20.0);
  CHECK(stats.max == 70.0);
  CHECK(norm.values(0, 0) == 0.0);
  CHECK(norm.values(1, 0) == 1.0);
  Matrix mid(1, 1);
  mid << 45;
  CHECK(normalize(make_series(mid), NormStats{20, 70}).first.values(0, 0) == 0.5);
  CHECK(denormalize(0.5, NormStats{20, 70}) == 45.0);
  CHECK(denormalize(0.0, NormStats{20, 70}) == 20.0);

  CHECK_THROWS_AS(normalize(make_series(Matrix::Constant(3, 2, 4.0))), std::invalid_argument);

  const StateSeries holes = inject_missing(make_series(ramp(30, 3)), 0.3, 2);
  const auto [n2, s2] = normalize(holes);
  CHECK(zero_filled(n2));
  const StateSeries back = denormalize(n2);
  CHECK((back.values - holes.values).cwiseProduct(holes.mask).cwiseAbs().maxCoeff() < 1e-12);
  CHECK(zero_filled(back));
}

TEST_CASE("split lengths") {
  const auto lengths = [](Index steps) {
    const SeriesSplit parts = split(make_series(ramp(steps, 2)), SplitSpec{});
    return std::vector<Index>{parts.train.steps(), parts.val.steps(), parts.test.steps()};
  };
  CHECK(lengths(10) == std::vector<Index>{6, 2, 2});
  CHECK(lengths(100) == std::vector<Index>{60, 20, 20});
  CHECK(lengths(11) == std::vector<Index>{6, 2, 3});

  const SplitSpec spec = SplitSpec::parse("7:1:2");
  CHECK(spec.train == doctest::Approx(0.7));
  CHECK_THROWS_AS(SplitSpec::parse("6:2"), std::invalid_argument);
  CHECK_THROWS_AS(SplitSpec::parse("6:0:2"), std::invalid_argument);
  CHECK_THROWS_AS(split(make_series(ramp(4, 2)), SplitSpec{}, 2), std::invalid_argument);

  const SeriesSplit parts = split(make_series(ramp(10, 2)), SplitSpec{});
  CHECK(parts.val.values(0, 0) == ramp(10, 2)(6, 0));
  CHECK(parts.test.timestamps.front() == 8 * kDefaultInterval);
}

TEST_CASE("window counts and losslessness") {
  CHECK(window(make_series(ramp(11, 2)), 10).size() == 1);
  const StateSeries series = inject_missing(make_series(ramp(100, 3)), 0.25, 1);
  const auto samples = window(series, 6);
  REQUIRE(samples.size() == 94);
  for (std::size_t k = 0; k < samples.size(); ++k) {
    const auto row = static_cast<Index>(k) + 6;
    CHECK(samples[k].label.transpose() == series.values.row(row));
    CHECK(samples[k].label_mask.transpose() == series.mask.row(row));
    CHECK(samples[k].inputs == series.values.middleRows(static_cast<Index>(k), 6));
    CHECK(samples[k].label_time == series.timestamps[static_cast<std::size_t>(row)]);
  }
  CHECK_THROWS_AS(window(series, 0), std::invalid_argument);
  CHECK_THROWS_AS(window(make_series(ramp(5, 2)), 5), std::invalid_argument);
}

TEST_CASE("window with separate label series keeps labels clean") {
  const StateSeries clean = make_series(ramp(20, 2));
  const StateSeries holes = inject_missing(clean, 0.5, 8);
  const auto samples = window(holes, clean, 3);
  for (const auto& s : samples) CHECK(s.label_mask == Vector::Ones(2));
  CHECK(samples[0].input_mask == holes.mask.topRows(3));
}

TEST_CASE("matrix csv") {
  Matrix m(2, 3);
  m << 0.1, 1e-300, -3, 1.0 / 3.0, 0, 5e20;
  std::ostringstream out;
  write_matrix_csv(out, m);
  std::istringstream in(out.str());
  CHECK(parse_matrix_csv(in) == m);

  std::istringstream ragged("1,2\n3\n");
  CHECK_THROWS_AS(parse_matrix_csv(ragged), std::invalid_argument);
  std::istringstream empty_cell("1,,2\n");
  CHECK_THROWS_AS(parse_matrix_csv(empty_cell), std::invalid_argument);
}
