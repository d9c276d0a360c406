#pragma once

#include <chrono>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace stlf::data {

// A UTC instant on an hour boundary, counted in hours since 1970-01-01T00Z.
struct HourStamp {
  std::int64_t hours = 0;

  friend auto operator<=>(const HourStamp&, const HourStamp&) = default;

  HourStamp operator+(std::int64_t h) const { return {hours + h}; }
  std::int64_t operator-(const HourStamp& o) const { return hours - o.hours; }

  int hour_of_day() const;
  std::chrono::year_month_day date() const;
  bool is_midnight() const { return hour_of_day() == 0; }

  static HourStamp from_date(std::chrono::year_month_day d, int hour = 0);
};

// Accepts YYYY-MM-DD[T| ]HH:MM[:SS][Z|+00:00]. Throws MalformedRow on
// syntax errors and NonHourlySpacing when minutes/seconds are nonzero.
HourStamp parse_timestamp(std::string_view text);
std::string format_timestamp(HourStamp t);

// YYYY-MM-DD
std::chrono::year_month_day parse_date(std::string_view text);
std::string format_date(std::chrono::year_month_day d);

// Contiguous hourly active-power samples in kW; values[i] is at start + i h.
struct LoadSeries {
  HourStamp start;
  std::vector<double> values;

  std::size_t size() const { return values.size(); }
  bool empty() const { return values.empty(); }
  HourStamp time_at(std::size_t i) const {
    return start + static_cast<std::int64_t>(i);
  }
  HourStamp end() const { return time_at(values.size()); }

  friend bool operator==(const LoadSeries&, const LoadSeries&) = default;
};

enum class CsvLayout { aggregated, per_household };

struct IngestStats {
  std::size_t rows = 0;
  std::size_t households = 0;
  std::size_t interpolated = 0;
};

// Longest run of missing hours that is filled by linear interpolation.
inline constexpr int kMaxInterpolatedGap = 3;

LoadSeries parse_load_csv(const std::filesystem::path& path, CsvLayout layout,
                          IngestStats* stats = nullptr);
LoadSeries parse_load_csv_text(std::string_view text, CsvLayout layout,
                               IngestStats* stats = nullptr);

// Inclusive end dates of the training and validation spans; the test span
// runs from the day after valid_end to the end of the series.
struct SplitSpec {
  std::chrono::year_month_day train_end{std::chrono::year{2019} / 12 / 31};
  std::chrono::year_month_day valid_end{std::chrono::year{2020} / 6 / 30};
};

struct SplitSeries {
  LoadSeries train;
  LoadSeries valid;
  LoadSeries test;
};

SplitSeries split_by_date(const LoadSeries& series, const SplitSpec& spec);

struct NormParams {
  double x_min = 0.0;
  double x_max = 1.0;

  friend bool operator==(const NormParams&, const NormParams&) = default;
};

enum class Direction { apply, invert };

NormParams fit_minmax(std::span<const double> train);
inline NormParams fit_minmax(const LoadSeries& train) {
  return fit_minmax(train.values);
}

std::vector<double> transform_minmax(std::span<const double> x,
                                     const NormParams& p, Direction direction);

struct Decomposition {
  std::size_t period = 24;
  std::vector<std::optional<double>> trend;
  std::vector<double> seasonal;
  std::vector<std::optional<double>> residual;
};

// Classical additive decomposition with a centred moving-average trend.
Decomposition decompose_additive(const LoadSeries& series,
                                 std::size_t period = 24);

// Paired (input, target) windows cut from a normalized series. Sample k
// covers [k*stride, k*stride + in_len) as input and the following out_len
// values as target.
struct WindowedDataset {
  std::size_t in_len = 24;
  std::size_t out_len = 24;
  std::vector<double> inputs;   // size() x in_len, row-major
  std::vector<double> targets;  // size() x out_len, row-major
  NormParams norm;

  std::size_t size() const { return in_len == 0 ? 0 : inputs.size() / in_len; }
  std::span<const double> input(std::size_t k) const {
    return {inputs.data() + k * in_len, in_len};
  }
  std::span<const double> target(std::size_t k) const {
    return {targets.data() + k * out_len, out_len};
  }
};

inline std::size_t window_count(std::size_t n, std::size_t in_len,
                                std::size_t out_len, std::size_t stride) {
  return n < in_len + out_len ? 0 : (n - in_len - out_len) / stride + 1;
}

WindowedDataset build_windows(std::span<const double> normalized,
                              std::size_t in_len, std::size_t out_len,
                              std::size_t stride, const NormParams& norm);

struct SyntheticSpec {
  std::size_t days = 30;
  double seasonal_amp = 3.0;   // kW
  double noise_sd = 0.0;       // kW
  double trend_slope = 0.0;    // kW per day
  std::uint64_t seed = 0;
  double base = 2.0;           // kW
  HourStamp start = HourStamp::from_date(std::chrono::year{2018} / 5 / 31);
};

// Daily load shape in [0, 1] with a morning and a larger evening peak.
double daily_shape(int hour_of_day);

LoadSeries generate_synthetic(const SyntheticSpec& spec);

// Output files.
void write_series_csv(const std::filesystem::path& path,
                      const LoadSeries& series);
void write_decomposition_csv(const std::filesystem::path& path,
                             const LoadSeries& series,
                             const Decomposition& d);

}  // namespace stlf::data
