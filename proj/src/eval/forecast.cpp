#include <algorithm>
#include <cmath>
#include <memory>
#include <string>

#include "stlf/error.hpp"
#include "stlf/eval.hpp"

namespace stlf::eval {
namespace {

struct DaySpan {
  std::size_t first = 0;  // index of the first midnight sample
  std::size_t days = 0;
  std::size_t dropped_leading = 0;
  std::size_t dropped_trailing = 0;
};

DaySpan align_days(const data::LoadSeries& s) {
  DaySpan d;
  const int hour = s.empty() ? 0 : s.start.hour_of_day();
  d.first = static_cast<std::size_t>((24 - hour) % 24);
  d.dropped_leading = std::min(d.first, s.size());
  const std::size_t rest = s.size() - d.dropped_leading;
  d.days = rest / kDay;
  d.dropped_trailing = rest - d.days * kDay;
  if (d.days < 2)
    throw Error(ErrorCode::SeriesTooShort,
                "walk-forward evaluation needs at least two whole days, got " +
                    std::to_string(d.days));
  return d;
}

ForecastWindows cut_windows(const data::LoadSeries& s) {
  const DaySpan d = align_days(s);
  ForecastWindows w;
  w.dropped_leading = d.dropped_leading;
  w.dropped_trailing = d.dropped_trailing;
  const std::size_t count = d.days - 1;
  const auto base = s.values.begin() + static_cast<std::ptrdiff_t>(d.first);
  w.inputs.assign(base, base + static_cast<std::ptrdiff_t>(count * kDay));
  w.actuals.assign(base + static_cast<std::ptrdiff_t>(kDay),
                   base + static_cast<std::ptrdiff_t>((count + 1) * kDay));
  for (std::size_t k = 0; k < count; ++k)
    w.target_starts.push_back(s.time_at(d.first + (k + 1) * kDay));
  return w;
}

EvalReport make_report(std::string name, std::size_t params, ForecastWindows w,
                       std::optional<data::NormParams> norm) {
  EvalReport r;
  r.model = std::move(name);
  r.param_count = params;
  r.hourly_rmse = hourly_rmse_profile(w.predictions, w.actuals);
  r.avg_daily_rmse = mean(r.hourly_rmse);
  r.windows = w.count();
  r.target_starts = std::move(w.target_starts);
  r.predictions = std::move(w.predictions);
  r.actuals = std::move(w.actuals);
  r.norm = norm;
  r.dropped_leading = w.dropped_leading;
  r.dropped_trailing = w.dropped_trailing;
  return r;
}

}  // namespace

ForecastWindows naive_forecast(const data::LoadSeries& test) {
  ForecastWindows w = cut_windows(test);
  w.predictions = w.inputs;
  return w;
}

ForecastModel identity_model() {
  ForecastModel m;
  m.name = "identity";
  m.predict = [](std::span<const double> in, std::size_t, std::span<double> out) {
    std::copy(in.begin(), in.end(), out.begin());
  };
  return m;
}

ForecastModel network_model(std::string name, const nn::ModelSpec& spec,
                            std::vector<double> params,
                            std::optional<data::NormParams> norm) {
  ForecastModel m;
  m.name = std::move(name);
  m.param_count = nn::param_count(spec);
  if (params.size() != m.param_count)
    throw Error(ErrorCode::ShapeMismatch, "parameter vector does not match the spec");
  m.normalized = true;
  m.norm = norm;
  auto net = std::make_shared<nn::Network>(spec);
  auto theta = std::make_shared<const std::vector<double>>(std::move(params));
  m.predict = [net, theta](std::span<const double> in, std::size_t count,
                           std::span<double> out) {
    constexpr std::size_t kChunk = 256;
    for (std::size_t first = 0; first < count; first += kChunk) {
      const std::size_t n = std::min(kChunk, count - first);
      const auto y = net->forward(*theta, in.subspan(first * kDay, n * kDay), n);
      std::copy(y.begin(), y.end(), out.begin() + static_cast<std::ptrdiff_t>(first * kDay));
    }
  };
  return m;
}

EvalReport walk_forward_eval(const ForecastModel& model, const data::LoadSeries& test) {
  if (model.normalized && !model.norm)
    throw Error(ErrorCode::NormMissing,
                "model '" + model.name + "' has no normalization parameters");
  ForecastWindows w = cut_windows(test);
  const std::size_t n = w.count();
  w.predictions.assign(n * kDay, 0.0);
  if (model.normalized) {
    const auto x = data::transform_minmax(w.inputs, *model.norm, data::Direction::apply);
    std::vector<double> y(n * kDay, 0.0);
    model.predict(x, n, y);
    w.predictions = data::transform_minmax(y, *model.norm, data::Direction::invert);
  } else {
    model.predict(w.inputs, n, w.predictions);
  }
  return make_report(model.name, model.param_count, std::move(w),
                     model.normalized ? model.norm : std::nullopt);
}

EvalReport naive_report(const data::LoadSeries& test) {
  return make_report("naive", 0, naive_forecast(test), std::nullopt);
}

std::vector<double> hourly_rmse_profile(std::span<const double> predictions,
                                        std::span<const double> actuals) {
  if (predictions.size() != actuals.size() || predictions.empty() ||
      predictions.size() % kDay != 0)
    throw Error(ErrorCode::ShapeMismatch,
                "predictions and actuals must be equal-sized W x 24 matrices with W >= 1");
  const std::size_t windows = predictions.size() / kDay;
  std::vector<double> profile(kDay, 0.0);
  for (std::size_t h = 0; h < kDay; ++h) {
    double acc = 0.0;
    for (std::size_t d = 0; d < windows; ++d) {
      const double e = actuals[d * kDay + h] - predictions[d * kDay + h];
      acc += e * e;
    }
    profile[h] = std::sqrt(acc / static_cast<double>(windows));
  }
  return profile;
}

double mean(std::span<const double> v) {
  if (v.empty()) return 0.0;
  double acc = 0.0;
  for (double x : v) acc += x;
  return acc / static_cast<double>(v.size());
}

ComparisonTable compare_models(std::span<const EvalReport> reports,
                               const std::string& reference) {
  const EvalReport* ref = nullptr;
  for (const auto& r : reports)
    if (r.model == reference) ref = &r;
  if (ref == nullptr)
    throw Error(ErrorCode::UnknownReference, "reference model '" + reference + "' not found");
  ComparisonTable t;
  t.reference = reference;
  for (const auto& r : reports) {
    ComparisonRow row{r.model, r.param_count, r.avg_daily_rmse, std::nullopt};
    if (r.model != reference)
      row.improvement_pct = 100.0 * (r.avg_daily_rmse - ref->avg_daily_rmse) / r.avg_daily_rmse;
    t.rows.push_back(std::move(row));
  }
  return t;
}

}  // namespace stlf::eval
