#include <cmath>
#include <cstring>
#include <filesystem>

#include "doctest.h"
#include "stlf/error.hpp"
#include "stlf/eval.hpp"
#include "stlf/io.hpp"
#include "stlf/nn/model.hpp"
#include "support/property.hpp"

using namespace stlf;
using namespace stlf::eval;
using namespace std::chrono;
using stlf::test::for_trials;
using stlf::test::pick;
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

data::LoadSeries days_of(std::vector<double> values, int start_hour = 0) {
  return {data::HourStamp::from_date(year{2020} / 7 / 1, start_hour), std::move(values)};
}

// Direct transcription of the hourly profile definition.
std::vector<double> profile_oracle(const std::vector<double>& p, const std::vector<double>& a) {
  const std::size_t w = p.size() / 24;
  std::vector<double> out(24);
  for (std::size_t h = 0; h < 24; ++h) {
    double s = 0;
    for (std::size_t d = 0; d < w; ++d) s += std::pow(a[d * 24 + h] - p[d * 24 + h], 2);
    out[h] = std::sqrt(s / static_cast<double>(w));
  }
  return out;
}

EvalReport fake_report(std::string name, std::size_t params, double rmse) {
  EvalReport r;
  r.model = std::move(name);
  r.param_count = params;
  r.avg_daily_rmse = rmse;
  return r;
}

}  // namespace

TEST_CASE("naive_forecast") {
  SUBCASE("periodic series has zero error") {
    data::SyntheticSpec spec;
    spec.days = 9;
    const auto r = naive_report(data::generate_synthetic(spec));
    CHECK(r.avg_daily_rmse == 0.0);
    CHECK(r.windows == 8);
  }
  SUBCASE("a constant 1 kW day-over-day offset") {
    std::vector<double> v(48);
    for (std::size_t i = 0; i < 24; ++i) v[i] = 0.1 * i, v[i + 24] = 0.1 * i + 1.0;
    const auto r = naive_report(days_of(v));
    CHECK(r.avg_daily_rmse == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(r.windows == 1);
  }
  SUBCASE("prediction k+1 is observed day k") {
    for_trials(20, 101, [](auto& rng) {
      const std::size_t days = pick(rng, 2, 12);
      const auto s = days_of(uniform_vec(rng, days * 24, 0.0, 5.0));
      const auto w = naive_forecast(s);
      REQUIRE(w.count() == days - 1);
      for (std::size_t k = 0; k + 1 < days; ++k) {
        CHECK(w.target_starts[k] == s.time_at((k + 1) * 24));
        for (std::size_t h = 0; h < 24; ++h) {
          CHECK(w.predictions[k * 24 + h] == s.values[k * 24 + h]);
          CHECK(w.actuals[k * 24 + h] == s.values[(k + 1) * 24 + h]);
        }
      }
    });
  }
  SUBCASE("partial days at both ends are dropped") {
    const auto s = days_of(std::vector<double>(5 + 72 + 7, 1.0), 19);
    const auto w = naive_forecast(s);
    CHECK(w.dropped_leading == 5);
    CHECK(w.dropped_trailing == 7);
    CHECK(w.count() == 2);
    CHECK(w.target_starts[0].is_midnight());
  }
  SUBCASE("184-day span gives 183 windows") {
    CHECK(naive_forecast(days_of(std::vector<double>(4416, 1.0))).count() == 183);
  }
  CHECK(code_of([] { naive_forecast(days_of(std::vector<double>(47, 1.0))); }) == ErrorCode::SeriesTooShort);
  CHECK(code_of([] { naive_forecast(days_of(std::vector<double>(60, 1.0), 3)); }) == ErrorCode::SeriesTooShort);
}

TEST_CASE("walk_forward_eval") {
  SUBCASE("identity model reproduces the naive forecast bit-for-bit") {
    for_trials(20, 102, [](auto& rng) {
      const auto s = days_of(uniform_vec(rng, pick(rng, 48, 400), 0.0, 6.0), static_cast<int>(pick(rng, 0, 23)));
      if (s.size() < 24 * 3) return;
      const auto a = walk_forward_eval(identity_model(), s);
      const auto b = naive_report(s);
      CHECK(std::memcmp(a.predictions.data(), b.predictions.data(), a.predictions.size() * 8) == 0);
      CHECK(a.hourly_rmse == b.hourly_rmse);
      CHECK(a.avg_daily_rmse == b.avg_daily_rmse);
    });
  }
  SUBCASE("normalized identity round-trips through min-max") {
    ForecastModel m = identity_model();
    m.normalized = true;
    m.norm = data::NormParams{0.5, 7.25};
    std::mt19937_64 rng(103);
    const auto s = days_of(uniform_vec(rng, 10 * 24, 0.0, 6.0));
    const auto a = walk_forward_eval(m, s), b = naive_report(s);
    for (std::size_t i = 0; i < a.predictions.size(); ++i)
      CHECK(std::abs(a.predictions[i] - b.predictions[i]) < 1e-12);
    m.norm.reset();
    CHECK(code_of([&] { walk_forward_eval(m, s); }) == ErrorCode::NormMissing);
  }
  SUBCASE("all-zero model on a constant 2 kW series") {
    ForecastModel zero;
    zero.name = "zero";
    zero.predict = [](std::span<const double>, std::size_t, std::span<double> out) {
      std::fill(out.begin(), out.end(), 0.0);
    };
    const auto r = walk_forward_eval(zero, days_of(std::vector<double>(5 * 24, 2.0)));
    CHECK(r.hourly_rmse == std::vector<double>(24, 2.0));
    CHECK(r.avg_daily_rmse == 2.0);
  }
  SUBCASE("network model inputs are the previous observed day") {
    // A linear Dense(24) with identity kernel is the naive forecast inside
    // the normalized domain.
    nn::ModelSpec spec;
    spec.layers = {nn::Flatten{}, nn::Dense{24}};
    nn::ParamStore p = nn::make_param_store(spec);
    auto k = p.slice(p.entry("dense_1", "kernel"));
    for (std::size_t i = 0; i < 24; ++i) k[i * 24 + i] = 1.0;
    std::mt19937_64 rng(104);
    const auto s = days_of(uniform_vec(rng, 6 * 24, 1.0, 3.0));
    const auto m = network_model("linear", spec, p.values, data::NormParams{1.0, 3.0});
    CHECK(m.param_count == 600);
    const auto r = walk_forward_eval(m, s);
    const auto naive = naive_report(s);
    for (std::size_t i = 0; i < r.predictions.size(); ++i)
      CHECK(std::abs(r.predictions[i] - naive.predictions[i]) < 1e-12);
    CHECK(code_of([&] { network_model("x", spec, {1.0}, std::nullopt); }) == ErrorCode::ShapeMismatch);
  }
}

TEST_CASE("hourly_rmse_profile") {
  std::vector<double> p(24, 0.0), a(24, 0.0);
  CHECK(hourly_rmse_profile(p, a) == std::vector<double>(24, 0.0));
  p[0] = 1.0;
  auto want = std::vector<double>(24, 0.0);
  want[0] = 1.0;
  CHECK(hourly_rmse_profile(p, a) == want);
  std::vector<double> p2(48, 0.0), a2(48, 0.0);
  a2[0] = 3.0, a2[24] = 4.0;
  CHECK(hourly_rmse_profile(p2, a2)[0] == doctest::Approx(std::sqrt(12.5)));
  CHECK(code_of([] { hourly_rmse_profile(std::vector<double>(24), std::vector<double>(48)); }) ==
        ErrorCode::ShapeMismatch);
  CHECK(code_of([] { hourly_rmse_profile(std::vector<double>{}, std::vector<double>{}); }) ==
        ErrorCode::ShapeMismatch);

  SUBCASE("matches the definition, is permutation-invariant and monotone") {
    for_trials(50, 105, [](auto& rng) {
      const std::size_t w = pick(rng, 1, 10);
      const auto pred = uniform_vec(rng, w * 24), act = uniform_vec(rng, w * 24);
      const auto prof = hourly_rmse_profile(pred, act);
      const auto want = profile_oracle(pred, act);
      for (std::size_t h = 0; h < 24; ++h) CHECK(std::abs(prof[h] - want[h]) < 1e-12);

      std::vector<std::size_t> order(w);
      std::iota(order.begin(), order.end(), 0);
      std::shuffle(order.begin(), order.end(), rng);
      std::vector<double> pp, aa;
      for (std::size_t d : order) {
        pp.insert(pp.end(), pred.begin() + d * 24, pred.begin() + (d + 1) * 24);
        aa.insert(aa.end(), act.begin() + d * 24, act.begin() + (d + 1) * 24);
      }
      const auto shuffled = hourly_rmse_profile(pp, aa);
      for (std::size_t h = 0; h < 24; ++h) CHECK(std::abs(shuffled[h] - prof[h]) < 1e-12);

      // A window whose error at every hour exceeds the current RMSE.
      auto p3 = pred, a3 = act;
      for (std::size_t h = 0; h < 24; ++h) p3.push_back(0.0), a3.push_back(prof[h] + 1.0);
      const auto grown = hourly_rmse_profile(p3, a3);
      for (std::size_t h = 0; h < 24; ++h) CHECK(grown[h] >= prof[h]);
    });
  }
}

TEST_CASE("EvalReport invariants") {
  for_trials(20, 106, [](auto& rng) {
    const auto s = days_of(uniform_vec(rng, pick(rng, 3, 15) * 24, 0.0, 4.0));
    const auto r = naive_report(s);
    CHECK(std::abs(r.avg_daily_rmse - mean(r.hourly_rmse)) < 1e-12);
    for (double v : r.hourly_rmse) CHECK(v >= 0.0);
  });
}

TEST_CASE("compare_models") {
  const std::vector<EvalReport> paper{fake_report("naive", 0, 1.787), fake_report("lstm", 51001, 1.590),
                                      fake_report("cnn-lstm", 332457, 1.545),
                                      fake_report("bilstm", 101801, 1.501),
                                      fake_report("cnn-bilstm", 664457, 1.541)};
  const auto t = compare_models(paper, "bilstm");
  REQUIRE(t.rows.size() == 5);
  CHECK(t.rows[0].model == "naive");
  CHECK_FALSE(t.rows[3].improvement_pct.has_value());
  CHECK(comparison_csv(t) ==
        "model,params,avg_rmse_kw,improvement_pct\n"
        "naive,0,1.7870,16.00\n"
        "lstm,51001,1.5900,5.60\n"
        "cnn-lstm,332457,1.5450,2.85\n"
        "bilstm,101801,1.5010,\n"
        "cnn-bilstm,664457,1.5410,2.60\n");
  const auto same = compare_models(std::vector<EvalReport>{fake_report("a", 1, 2.0), fake_report("b", 1, 2.0)}, "a");
  CHECK(*same.rows[1].improvement_pct == 0.0);
  CHECK(code_of([&] { compare_models(paper, "svm"); }) == ErrorCode::UnknownReference);
}

TEST_CASE("report files") {
  data::SyntheticSpec spec;
  spec.days = 4;
  spec.noise_sd = 0.5;
  auto r = naive_report(data::generate_synthetic(spec));
  r.checkpoint = "runs/x/checkpoint.json";
  const auto dir = std::filesystem::temp_directory_path() / "stlf_eval_test";
  write_report_json(dir / "report.json", r);
  const auto back = read_report_json(dir / "report.json");
  CHECK(back.model == r.model);
  CHECK(back.hourly_rmse == r.hourly_rmse);
  CHECK(back.avg_daily_rmse == r.avg_daily_rmse);
  CHECK(back.windows == 3);
  CHECK(back.checkpoint == r.checkpoint);

  write_profile_csv(dir / "profile.csv", r);
  const std::string prof = io::read_file(dir / "profile.csv");
  CHECK(prof.rfind("hour,rmse_kw\n0,", 0) == 0);
  CHECK(std::count(prof.begin(), prof.end(), '\n') == 25);

  write_predictions_csv(dir / "pred.csv", r);
  const std::string pred = io::read_file(dir / "pred.csv");
  CHECK(pred.rfind("timestamp,actual_kw,predicted_kw\n2018-06-01T00:00:00Z,", 0) == 0);
  CHECK(std::count(pred.begin(), pred.end(), '\n') == 1 + 3 * 24);

  io::write_file_atomic(dir / "cited.json", R"({"model": "svm", "params": 0, "avg_daily_rmse": 2.1})");
  CHECK(read_report_json(dir / "cited.json").avg_daily_rmse == 2.1);
  io::write_file_atomic(dir / "broken.json", "{");
  CHECK(code_of([&] { read_report_json(dir / "broken.json"); }) == ErrorCode::BadConfig);
}
