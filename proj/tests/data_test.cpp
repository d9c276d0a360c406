#include <chrono>
#include <cmath>
#include <filesystem>
#include <numbers>
#include <string>

#include "doctest.h"
#include "stlf/data.hpp"
#include "stlf/error.hpp"
#include "stlf/io.hpp"
#include "support/property.hpp"

using namespace stlf;
using namespace stlf::data;
using namespace std::chrono;
using stlf::test::for_trials;
using stlf::test::pick;
using stlf::test::uniform;
using stlf::test::uniform_vec;

namespace {

ErrorCode code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an stlf::Error");
  return ErrorCode::Io;
}

std::string stamp(int hour_offset) {
  return format_timestamp(HourStamp::from_date(year{2020} / 1 / 1) + hour_offset);
}

LoadSeries random_series(std::mt19937_64& rng, std::size_t n) {
  LoadSeries s{HourStamp::from_date(year{2020} / 1 / 1) + static_cast<int64_t>(pick(rng, 0, 23)),
               uniform_vec(rng, n, 0.0, 8.0)};
  return s;
}

}  // namespace

TEST_CASE("timestamps") {
  const HourStamp t = parse_timestamp("2020-07-01T05:00:00Z");
  CHECK(t.hour_of_day() == 5);
  CHECK(t.date() == year{2020} / 7 / 1);
  CHECK(format_timestamp(t) == "2020-07-01T05:00:00Z");
  CHECK(parse_timestamp("2020-07-01 05:00") == t);
  CHECK(parse_timestamp("2020-07-01T05:00:00+00:00") == t);
  CHECK(parse_timestamp("1970-01-01T00:00:00Z").hours == 0);
  CHECK(code_of([] { parse_timestamp("2020-07-01T05:30:00Z"); }) == ErrorCode::NonHourlySpacing);
  CHECK(code_of([] { parse_timestamp("2020-13-01T05:00:00Z"); }) == ErrorCode::MalformedRow);
  CHECK(code_of([] { parse_timestamp("yesterday"); }) == ErrorCode::MalformedRow);
}

TEST_CASE("parse_load_csv aggregated pass-through") {
  const std::string csv = "timestamp,active_power_kw\n" + stamp(0) + ",1.0\n" + stamp(1) +
                          ",2.0\n" + stamp(2) + ",3.0\n";
  const LoadSeries s = parse_load_csv_text(csv, CsvLayout::aggregated);
  CHECK(s.values == std::vector<double>{1.0, 2.0, 3.0});
  CHECK(s.start == HourStamp::from_date(year{2020} / 1 / 1));
}

TEST_CASE("parse_load_csv per-household sums homes") {
  const std::string csv = "timestamp,h01,h02\n" + stamp(0) + ",0.5,1.5\n";
  IngestStats stats;
  const LoadSeries s = parse_load_csv_text(csv, CsvLayout::per_household, &stats);
  CHECK(s.values == std::vector<double>{2.0});
  CHECK(stats.households == 2);
}

TEST_CASE("aggregation linearity: per-household parse equals the sum of single-home parses") {
  for_trials(20, 11, [](auto& rng) {
    const std::size_t homes = pick(rng, 1, 5), rows = pick(rng, 1, 30);
    std::string all = "timestamp";
    std::vector<std::string> single(homes, "timestamp,h01\n");
    for (std::size_t h = 0; h < homes; ++h) all += ",h" + std::string(h < 9 ? "0" : "") + std::to_string(h + 1);
    all += "\n";
    // Quarter-kW values keep every partial sum exact.
    for (std::size_t r = 0; r < rows; ++r) {
      all += stamp(static_cast<int>(r));
      for (std::size_t h = 0; h < homes; ++h) {
        const std::string v = std::to_string(static_cast<double>(pick(rng, 0, 40)) / 4.0);
        all += "," + v;
        single[h] += stamp(static_cast<int>(r)) + "," + v + "\n";
      }
      all += "\n";
    }
    std::vector<double> sum(rows, 0.0);
    for (const auto& text : single) {
      const auto part = parse_load_csv_text(text, CsvLayout::per_household);
      for (std::size_t r = 0; r < rows; ++r) sum[r] += part.values[r];
    }
    CHECK(parse_load_csv_text(all, CsvLayout::per_household).values == sum);
  });
}

TEST_CASE("gap handling") {
  SUBCASE("one missing hour is the interpolated midpoint") {
    const std::string csv = "timestamp,active_power_kw\n" + stamp(0) + ",1.0\n" + stamp(2) + ",3.0\n";
    IngestStats stats;
    CHECK(parse_load_csv_text(csv, CsvLayout::aggregated, &stats).values ==
          std::vector<double>{1.0, 2.0, 3.0});
    CHECK(stats.interpolated == 1);
  }
  SUBCASE("three missing hours are filled linearly") {
    const std::string csv = "timestamp,active_power_kw\n" + stamp(0) + ",0\n" + stamp(4) + ",4\n";
    CHECK(parse_load_csv_text(csv, CsvLayout::aggregated).values ==
          std::vector<double>{0, 1, 2, 3, 4});
  }
  SUBCASE("four missing hours are rejected") {
    const std::string csv = "timestamp,active_power_kw\n" + stamp(0) + ",0\n" + stamp(5) + ",4\n";
    CHECK(code_of([&] { parse_load_csv_text(csv, CsvLayout::aggregated); }) == ErrorCode::GapTooLarge);
  }
}

TEST_CASE("ingest errors") {
  const std::string head = "timestamp,active_power_kw\n";
  CHECK(code_of([&] { parse_load_csv_text(head, CsvLayout::aggregated); }) == ErrorCode::EmptyFile);
  CHECK(code_of([&] { parse_load_csv_text("", CsvLayout::aggregated); }) == ErrorCode::EmptyFile);
  CHECK(code_of([&] { parse_load_csv_text(head + stamp(0) + ",abc\n", CsvLayout::aggregated); }) ==
        ErrorCode::MalformedRow);
  CHECK(code_of([&] { parse_load_csv_text(head + stamp(0) + ",-1\n", CsvLayout::aggregated); }) ==
        ErrorCode::MalformedRow);
  CHECK(code_of([&] {
          parse_load_csv_text(head + stamp(1) + ",1\n" + stamp(0) + ",1\n", CsvLayout::aggregated);
        }) == ErrorCode::NonHourlySpacing);
  CHECK(code_of([&] {
          parse_load_csv_text(head + stamp(1) + ",1\n" + stamp(1) + ",1\n", CsvLayout::aggregated);
        }) == ErrorCode::NonHourlySpacing);
  CHECK(code_of([&] { parse_load_csv_text("time,kw\n" + stamp(0) + ",1\n", CsvLayout::aggregated); }) ==
        ErrorCode::MalformedRow);
  CHECK(code_of([] { parse_load_csv("/nonexistent/load.csv", CsvLayout::aggregated); }) ==
        ErrorCode::Io);
}

TEST_CASE("series CSV round trip is exact") {
  for_trials(5, 12, [](auto& rng) {
    const LoadSeries s = random_series(rng, 50);
    const auto path = std::filesystem::temp_directory_path() / "stlf_data_test" / "series.csv";
    write_series_csv(path, s);
    CHECK(parse_load_csv(path, CsvLayout::aggregated) == s);
  });
}

TEST_CASE("split_by_date") {
  SUBCASE("3-day series split at day 1 / day 2") {
    const LoadSeries s{HourStamp::from_date(year{2020} / 1 / 1), std::vector<double>(72, 1.0)};
    const auto parts = split_by_date(s, {year{2020} / 1 / 1, year{2020} / 1 / 2});
    CHECK(parts.train.size() == 24);
    CHECK(parts.valid.size() == 24);
    CHECK(parts.test.size() == 24);
    CHECK(parts.valid.start == HourStamp::from_date(year{2020} / 1 / 2));
    CHECK(parts.test.start == HourStamp::from_date(year{2020} / 1 / 3));
  }
  SUBCASE("reference calendar: the test span is 184 days") {
    const HourStamp first = HourStamp::from_date(year{2018} / 5 / 31);
    const HourStamp last = HourStamp::from_date(year{2021} / 1 / 1);
    const LoadSeries s{first, std::vector<double>(static_cast<std::size_t>(last - first), 1.0)};
    const auto parts = split_by_date(s, SplitSpec{});
    CHECK(parts.test.size() == 4416);
    CHECK(parts.test.start == HourStamp::from_date(year{2020} / 7 / 1));
    CHECK(parts.valid.size() == 182 * 24);
    CHECK(parts.train.start == first);
  }
  SUBCASE("boundaries outside the series") {
    const LoadSeries s{HourStamp::from_date(year{2020} / 1 / 1), std::vector<double>(72, 1.0)};
    CHECK(code_of([&] { split_by_date(s, SplitSpec{}); }) == ErrorCode::BoundaryOutOfRange);
    CHECK(code_of([&] { split_by_date(s, {year{2020} / 1 / 2, year{2020} / 1 / 1}); }) ==
          ErrorCode::BoundaryOutOfRange);
  }
  SUBCASE("pieces concatenate to the original bit-exactly") {
    for_trials(50, 13, [](auto& rng) {
      const std::size_t n_days = pick(rng, 4, 20);
      LoadSeries s = random_series(rng, n_days * 24 + pick(rng, 0, 30));
      const auto first_day = s.start.date();
      const int a = static_cast<int>(pick(rng, 1, n_days - 3));
      const int b = a + static_cast<int>(pick(rng, 1, n_days - 2 - a));
      const SplitSpec spec{sys_days(first_day) + std::chrono::days{a},
                           sys_days(first_day) + std::chrono::days{b}};
      const auto p = split_by_date(s, spec);
      std::vector<double> joined = p.train.values;
      joined.insert(joined.end(), p.valid.values.begin(), p.valid.values.end());
      joined.insert(joined.end(), p.test.values.begin(), p.test.values.end());
      CHECK(joined == s.values);
      CHECK(p.valid.start == p.train.end());
      CHECK(p.test.start == p.valid.end());
      CHECK(p.valid.start.is_midnight());
    });
  }
}

TEST_CASE("fit_minmax and transform_minmax") {
  const std::vector<double> a{2, 4, 6};
  CHECK(fit_minmax(a) == NormParams{2, 6});
  CHECK(fit_minmax(std::vector<double>{0, 10.5}) == NormParams{0, 10.5});
  CHECK(code_of([] { fit_minmax(std::vector<double>{5, 5, 5}); }) == ErrorCode::DegenerateRange);
  const NormParams p{2, 6};
  CHECK(transform_minmax(a, p, Direction::apply) == std::vector<double>{0, 0.5, 1});
  CHECK(transform_minmax(std::vector<double>{0.5}, p, Direction::invert) == std::vector<double>{4});
  CHECK(transform_minmax(std::vector<double>{8}, p, Direction::apply) == std::vector<double>{1.5});

  for_trials(200, 14, [](auto& rng) {
    const double lo = uniform(rng, -100, 100);
    const NormParams q{lo, lo + uniform(rng, 1e-3, 50)};
    const auto x = uniform_vec(rng, 40, -200, 200);
    const auto back =
        transform_minmax(transform_minmax(x, q, Direction::apply), q, Direction::invert);
    for (std::size_t i = 0; i < x.size(); ++i) CHECK(std::abs(back[i] - x[i]) < 1e-12 * std::max(1.0, std::abs(x[i])));
  });
}

TEST_CASE("decompose_additive") {
  const std::size_t n = 240;
  LoadSeries sine{HourStamp::from_date(year{2020} / 1 / 1), std::vector<double>(n)};
  for (std::size_t i = 0; i < n; ++i) sine.values[i] = std::sin(2 * std::numbers::pi * i / 24.0);

  SUBCASE("pure periodic series: zero trend and residual") {
    const auto d = decompose_additive(sine, 24);
    for (std::size_t i = 0; i < n; ++i) {
      CHECK(d.trend[i].has_value() == (i >= 12 && i < n - 12));
      if (!d.trend[i]) continue;
      CHECK(std::abs(*d.trend[i]) < 1e-9);
      CHECK(std::abs(*d.residual[i]) < 1e-9);
    }
  }
  SUBCASE("constant shift moves only the trend") {
    LoadSeries shifted = sine;
    for (double& v : shifted.values) v += 5.0;
    const auto a = decompose_additive(sine, 24), b = decompose_additive(shifted, 24);
    for (std::size_t i = 0; i < n; ++i) {
      CHECK(std::abs(a.seasonal[i] - b.seasonal[i]) < 1e-9);
      if (b.trend[i]) CHECK(std::abs(*b.trend[i] - 5.0) < 1e-9);
    }
  }
  SUBCASE("trend is the half-weighted centred average") {
    for_trials(10, 15, [](auto& rng) {
      const LoadSeries s = random_series(rng, 24 * pick(rng, 2, 8) + pick(rng, 0, 23));
      const auto d = decompose_additive(s, 24);
      for (std::size_t i = 12; i + 12 < s.size(); ++i) {
        double acc = 0.5 * (s.values[i - 12] + s.values[i + 12]);
        for (std::size_t j = i - 11; j <= i + 11; ++j) acc += s.values[j];
        REQUIRE(d.trend[i].has_value());
        CHECK(std::abs(*d.trend[i] - acc / 24.0) < 1e-12);
      }
    });
  }
  SUBCASE("recomposition, periodicity and zero-mean seasonal on random inputs") {
    for_trials(30, 16, [](auto& rng) {
      const LoadSeries s = random_series(rng, pick(rng, 48, 500));
      const auto d = decompose_additive(s, 24);
      double season_sum = 0.0;
      for (std::size_t h = 0; h < 24; ++h) season_sum += d.seasonal[h];
      CHECK(std::abs(season_sum) < 1e-9);
      for (std::size_t i = 0; i < s.size(); ++i) {
        if (i >= 24) CHECK(d.seasonal[i] == d.seasonal[i - 24]);
        if (d.trend[i])
          CHECK(std::abs(*d.trend[i] + d.seasonal[i] + *d.residual[i] - s.values[i]) < 1e-9);
        else
          CHECK_FALSE(d.residual[i].has_value());
      }
    });
  }
  SUBCASE("too short") {
    const LoadSeries s{HourStamp{}, std::vector<double>(47, 1.0)};
    CHECK(code_of([&] { decompose_additive(s, 24); }) == ErrorCode::SeriesTooShort);
  }
  SUBCASE("CSV leaves undefined fields empty") {
    const auto path = std::filesystem::temp_directory_path() / "stlf_data_test" / "dec.csv";
    write_decomposition_csv(path, sine, decompose_additive(sine, 24));
    const std::string text = io::read_file(path);
    CHECK(text.rfind("timestamp,observed,trend,seasonal,residual\n", 0) == 0);
    const auto second = text.substr(text.find('\n') + 1);
    const auto row = second.substr(0, second.find('\n'));
    CHECK(row.find(",,") != std::string::npos);
    CHECK(row.back() == ',');
  }
}

TEST_CASE("build_windows") {
  auto ramp = [](std::size_t n) {
    std::vector<double> v(n);
    for (std::size_t i = 0; i < n; ++i) v[i] = static_cast<double>(i);
    return v;
  };
  CHECK(build_windows(ramp(48), 24, 24, 1, {}).size() == 1);
  CHECK(build_windows(ramp(72), 24, 24, 1, {}).size() == 25);
  CHECK(build_windows(ramp(4416), 24, 24, 24, {}).size() == 183);
  CHECK(code_of([&] { build_windows(ramp(47), 24, 24, 1, {}); }) == ErrorCode::SeriesTooShort);

  SUBCASE("sample k slices the series at k*stride") {
    for_trials(100, 17, [&](auto& rng) {
      const std::size_t n = pick(rng, 48, 400), stride = pick(rng, 1, 30);
      const auto series = ramp(n);
      const auto ds = build_windows(series, 24, 24, stride, {});
      CHECK(ds.size() == (n - 48) / stride + 1);
      CHECK(ds.size() == window_count(n, 24, 24, stride));
      const std::size_t k = pick(rng, 0, ds.size() - 1);
      for (std::size_t j = 0; j < 24; ++j) {
        CHECK(ds.input(k)[j] == series[k * stride + j]);
        CHECK(ds.target(k)[j] == series[k * stride + 24 + j]);
      }
    });
  }
  SUBCASE("stride-24 targets tile the series from hour 24") {
    for_trials(20, 18, [](auto& rng) {
      const std::size_t days = pick(rng, 2, 20);
      const auto series = uniform_vec(rng, days * 24);
      const auto ds = build_windows(series, 24, 24, 24, {});
      CHECK(std::vector<double>(series.begin() + 24, series.end()) == ds.targets);
    });
  }
}

TEST_CASE("generate_synthetic") {
  SyntheticSpec spec;
  spec.days = 10;
  const auto s = generate_synthetic(spec);
  CHECK(s.size() == 240);
  for (std::size_t i = 24; i < s.size(); ++i) CHECK(s.values[i] == s.values[i - 24]);
  CHECK(s.values[0] == doctest::Approx(spec.base + spec.seasonal_amp * daily_shape(0)));
  double lo = 1, hi = 0;
  for (int h = 0; h < 24; ++h) lo = std::min(lo, daily_shape(h)), hi = std::max(hi, daily_shape(h));
  CHECK(lo == 0.0);
  CHECK(hi == 1.0);
  CHECK(daily_shape(19) == 1.0);

  spec.noise_sd = 0.8;
  spec.seed = 42;
  spec.trend_slope = 0.1;
  const auto a = generate_synthetic(spec), b = generate_synthetic(spec);
  CHECK(a == b);
  spec.seed = 43;
  CHECK_FALSE(generate_synthetic(spec) == a);
  for (double v : a.values) CHECK(v >= 0.0);
}
