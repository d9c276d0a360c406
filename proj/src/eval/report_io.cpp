#include <cstdio>

#include "json.hpp"
#include "stlf/error.hpp"
#include "stlf/eval.hpp"
#include "stlf/io.hpp"

namespace stlf::eval {

using nlohmann::json;

void write_report_json(const std::filesystem::path& path, const EvalReport& r) {
  json j;
  j["model"] = r.model;
  j["params"] = r.param_count;
  j["hourly_rmse"] = r.hourly_rmse;
  j["avg_daily_rmse"] = r.avg_daily_rmse;
  j["windows"] = r.windows;
  j["norm"] = r.norm ? json{{"x_min", r.norm->x_min}, {"x_max", r.norm->x_max}} : json(nullptr);
  j["checkpoint"] = r.checkpoint.empty() ? json(nullptr) : json(r.checkpoint);
  j["dropped_leading_hours"] = r.dropped_leading;
  j["dropped_trailing_hours"] = r.dropped_trailing;
  io::write_file_atomic(path, j.dump(2) + "\n");
}

EvalReport read_report_json(const std::filesystem::path& path) {
  const std::string text = io::read_file(path);
  try {
    const json j = json::parse(text);
    EvalReport r;
    r.model = j.at("model").get<std::string>();
    r.param_count = j.at("params").get<std::size_t>();
    r.avg_daily_rmse = j.at("avg_daily_rmse").get<double>();
    // Cited figures from elsewhere carry only a name, a size and a score.
    if (j.contains("hourly_rmse")) r.hourly_rmse = j["hourly_rmse"].get<std::vector<double>>();
    if (j.contains("windows")) r.windows = j["windows"].get<std::size_t>();
    if (j.contains("norm") && !j["norm"].is_null())
      r.norm = data::NormParams{j["norm"].at("x_min").get<double>(),
                                j["norm"].at("x_max").get<double>()};
    if (j.contains("checkpoint") && !j["checkpoint"].is_null())
      r.checkpoint = j["checkpoint"].get<std::string>();
    return r;
  } catch (const json::exception& e) {
    throw Error(ErrorCode::BadConfig,
                "malformed report " + path.string() + ": " + e.what());
  }
}

void write_profile_csv(const std::filesystem::path& path, const EvalReport& r) {
  std::string out = "hour,rmse_kw\n";
  for (std::size_t h = 0; h < r.hourly_rmse.size(); ++h)
    out += std::to_string(h) + "," + io::format_double(r.hourly_rmse[h]) + "\n";
  io::write_file_atomic(path, out);
}

void write_predictions_csv(const std::filesystem::path& path, const EvalReport& r) {
  std::string out = "timestamp,actual_kw,predicted_kw\n";
  for (std::size_t w = 0; w < r.windows; ++w)
    for (std::size_t h = 0; h < kDay; ++h) {
      const std::size_t i = w * kDay + h;
      out += data::format_timestamp(r.target_starts[w] + static_cast<std::int64_t>(h));
      out += "," + io::format_double(r.actuals[i]) + "," + io::format_double(r.predictions[i]) +
             "\n";
    }
  io::write_file_atomic(path, out);
}

std::string comparison_csv(const ComparisonTable& t) {
  std::string out = "model,params,avg_rmse_kw,improvement_pct\n";
  char buf[64];
  for (const auto& row : t.rows) {
    out += row.model + "," + std::to_string(row.params) + ",";
    std::snprintf(buf, sizeof buf, "%.4f", row.avg_rmse);
    out += buf;
    out += ",";
    if (row.improvement_pct) {
      std::snprintf(buf, sizeof buf, "%.2f", *row.improvement_pct);
      out += buf;
    }
    out += "\n";
  }
  return out;
}

void write_comparison_csv(const std::filesystem::path& path, const ComparisonTable& t) {
  io::write_file_atomic(path, comparison_csv(t));
}

}  // namespace stlf::eval
