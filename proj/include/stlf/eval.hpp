#pragma once

#include <cstddef>
#include <filesystem>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "stlf/data.hpp"
#include "stlf/nn/model.hpp"

namespace stlf::eval {

inline constexpr std::size_t kDay = 24;

// Day-ahead windows over a test span: row k of `inputs` is observed day k,
// row k of `actuals` is day k + 1, and `predictions` holds the forecast for
// day k + 1. All values in kW. Partial leading/trailing days are dropped and
// counted.
struct ForecastWindows {
  std::vector<data::HourStamp> target_starts;
  std::vector<double> inputs;
  std::vector<double> predictions;
  std::vector<double> actuals;
  std::size_t dropped_leading = 0;
  std::size_t dropped_trailing = 0;

  std::size_t count() const { return target_starts.size(); }
};

// Persistence forecast: tomorrow's profile equals today's.
ForecastWindows naive_forecast(const data::LoadSeries& test);

// A day-ahead predictor. When `normalized` is set the predictor consumes and
// produces min-max normalized values and `norm` must be present; otherwise
// it works directly in kW.
struct ForecastModel {
  std::string name;
  std::size_t param_count = 0;
  bool normalized = false;
  std::optional<data::NormParams> norm;
  // inputs: count x 24, outputs: count x 24
  std::function<void(std::span<const double> inputs, std::size_t count,
                     std::span<double> outputs)>
      predict;
};

// Output equals input, in kW. Reproduces the naive forecast exactly.
ForecastModel identity_model();

ForecastModel network_model(std::string name, const nn::ModelSpec& spec,
                            std::vector<double> params,
                            std::optional<data::NormParams> norm);

struct EvalReport {
  std::string model;
  std::size_t param_count = 0;
  std::vector<double> hourly_rmse;  // 24 entries, kW
  double avg_daily_rmse = 0.0;      // mean of hourly_rmse, kW
  std::size_t windows = 0;
  std::vector<data::HourStamp> target_starts;
  std::vector<double> predictions;  // windows x 24, kW
  std::vector<double> actuals;      // windows x 24, kW
  std::optional<data::NormParams> norm;
  std::string checkpoint;           // path of the evaluated checkpoint, if any
  std::size_t dropped_leading = 0;
  std::size_t dropped_trailing = 0;
};

// Slides over the midnight-aligned test span one day at a time, always
// feeding the previous observed day.
EvalReport walk_forward_eval(const ForecastModel& model, const data::LoadSeries& test);

EvalReport naive_report(const data::LoadSeries& test);

// Entry h is the RMSE across windows at hour-of-day h.
std::vector<double> hourly_rmse_profile(std::span<const double> predictions,
                                        std::span<const double> actuals);

double mean(std::span<const double> v);

struct ComparisonRow {
  std::string model;
  std::size_t params = 0;
  double avg_rmse = 0.0;
  std::optional<double> improvement_pct;  // empty for the reference row
};

struct ComparisonTable {
  std::string reference;
  std::vector<ComparisonRow> rows;
};

// improvement_pct = 100 * (other - reference) / other, positive when the
// reference model has the lower error.
ComparisonTable compare_models(std::span<const EvalReport> reports,
                               const std::string& reference);

// Files
void write_report_json(const std::filesystem::path& path, const EvalReport& r);
EvalReport read_report_json(const std::filesystem::path& path);
void write_profile_csv(const std::filesystem::path& path, const EvalReport& r);
void write_predictions_csv(const std::filesystem::path& path, const EvalReport& r);
std::string comparison_csv(const ComparisonTable& t);
void write_comparison_csv(const std::filesystem::path& path, const ComparisonTable& t);

}  // namespace stlf::eval
