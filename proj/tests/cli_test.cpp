#include <filesystem>
#include <sstream>
#include <string>
#include <vector>

#include "doctest.h"
#include "json.hpp"
#include "stlf/cli.hpp"
#include "stlf/error.hpp"
#include "stlf/eval.hpp"
#include "stlf/io.hpp"

using namespace stlf;
namespace fs = std::filesystem;

namespace {

struct Result {
  int status;
  std::string out, err;
};

Result run(std::vector<std::string> args) {
  args.insert(args.begin(), "stlf");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int status = cli::run_command(static_cast<int>(argv.size()), argv.data(), out, err);
  return {status, out.str(), err.str()};
}

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / "stlf_cli_test" / name;
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

ErrorCode code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an stlf::Error");
  return ErrorCode::Io;
}

// A 40-day synthetic series with a split that leaves 10 test days.
const std::vector<std::string> kSplit{"--train-end", "2018-06-26", "--valid-end", "2018-06-30"};

fs::path make_series(const fs::path& dir, const std::string& noise = "0") {
  const auto r = run({"synth", "--out", dir.string(), "--days", "41", "--noise", noise, "--seed", "3"});
  REQUIRE(r.status == 0);
  return dir / "series.csv";
}

std::vector<std::string> cat(std::vector<std::string> a, const std::vector<std::string>& b) {
  a.insert(a.end(), b.begin(), b.end());
  return a;
}

}  // namespace

TEST_CASE("config schema") {
  const auto schema = nlohmann::json::parse(cli::config_schema());
  CHECK(schema["additionalProperties"] == false);
  // The resolved defaults satisfy the published schema.
  cli::validate_config_json(cli::config_to_json(cli::RunConfig{}));
  CHECK(code_of([] { cli::validate_config_json({{"modle", "lstm"}}); }) == ErrorCode::BadConfig);
  CHECK(code_of([] { cli::validate_config_json({{"train", {{"batch", 3}}}}); }) == ErrorCode::BadConfig);
  CHECK(code_of([] { cli::validate_config_json({{"model", "gru"}}); }) == ErrorCode::BadConfig);
  CHECK(code_of([] { cli::validate_config_json({{"train", {{"batch_size", 0}}}}); }) == ErrorCode::BadConfig);
  CHECK(code_of([] { cli::validate_config_json({{"train", {{"beta1", 1.0}}}}); }) == ErrorCode::BadConfig);
  CHECK(code_of([] { cli::validate_config_json({{"seed", 1.5}}); }) == ErrorCode::BadConfig);
  CHECK(code_of([] { cli::validate_config_json({{"split", {{"train_end", "2019-02-30"}}}}); }) ==
        ErrorCode::BadConfig);
  CHECK(code_of([] { cli::validate_config_json({{"grid", {{"batch_sizes", nlohmann::json::array()}}}}); }) ==
        ErrorCode::BadConfig);
  CHECK(code_of([] { cli::validate_config_json(nlohmann::json::array()); }) == ErrorCode::BadConfig);

  const auto c = cli::config_from_json({{"model", "cnn-lstm"}, {"train", {{"batch_size", 96}}}, {"seed", 7}});
  CHECK(c.model == nn::ModelKind::cnn_lstm);
  CHECK(c.train.batch_size == 96);
  CHECK(c.train.learning_rate == 1e-3);
  CHECK(c.seed == 7);
  const auto round = cli::config_from_json(cli::config_to_json(c));
  CHECK(cli::config_to_json(round) == cli::config_to_json(c));
}

TEST_CASE("config file and flag precedence") {
  const fs::path dir = scratch("precedence");
  const fs::path cfg = dir / "run.json";
  io::write_file_atomic(cfg, R"({"synth": {"days": 3}, "seed": 5, "out": ")" + (dir / "a").string() + "\"}");
  REQUIRE(run({"synth", "--config", cfg.string()}).status == 0);
  CHECK(fs::exists(dir / "a" / "series.csv"));
  REQUIRE(run({"synth", "--config", cfg.string(), "--days", "4", "--out", (dir / "b").string()}).status == 0);
  const auto snap = nlohmann::json::parse(io::read_file(dir / "b" / "synth_config.json"));
  CHECK(snap["synth"]["days"] == 4);
  CHECK(snap["seed"] == 5);
  io::write_file_atomic(dir / "bad.json", R"({"sede": 5})");
  const auto r = run({"synth", "--config", (dir / "bad.json").string()});
  CHECK(r.status == static_cast<int>(ErrorCode::BadConfig));
  CHECK(r.err.find("/sede") != std::string::npos);
}

TEST_CASE("usage and help") {
  CHECK(run({}).status == 2);
  CHECK(run({"frobnicate"}).status == 2);
  CHECK(run({"train", "--epochs", "many"}).status == 2);
  const auto help = run({"--help"});
  CHECK(help.status == 0);
  for (const char* s : {"ingest", "decompose", "synth", "train", "evaluate", "gridsearch", "compare",
                        "11  GapTooLarge", "52  BadConfig"})
    CHECK(help.out.find(s) != std::string::npos);
}

TEST_CASE("ingest and decompose") {
  const fs::path dir = scratch("ingest");
  const fs::path series = make_series(dir);
  const auto r = run({"ingest", "--data", series.string(), "--out", dir.string()});
  CHECK(r.status == 0);
  CHECK(r.out.find("hours 984") != std::string::npos);
  io::write_file_atomic(dir / "gap.csv",
                        "timestamp,active_power_kw\n2020-01-01T00:00:00Z,1\n2020-01-01T05:00:00Z,1\n");
  const auto gap = run({"ingest", "--data", (dir / "gap.csv").string(), "--out", dir.string()});
  CHECK(gap.status == static_cast<int>(ErrorCode::GapTooLarge));
  CHECK(gap.err.find("GapTooLarge") != std::string::npos);
  CHECK(std::count(gap.err.begin(), gap.err.end(), '\n') == 1);

  CHECK(run({"decompose", "--data", series.string(), "--out", dir.string()}).status == 0);
  const std::string dec = io::read_file(dir / "decomposition.csv");
  CHECK(dec.rfind("timestamp,observed,trend,seasonal,residual\n", 0) == 0);
}

TEST_CASE("evaluate --model naive on a noise-free series") {
  const fs::path dir = scratch("naive");
  const fs::path series = make_series(dir);
  const auto r = run(cat({"evaluate", "--model", "naive", "--data", series.string(), "--out", dir.string()}, kSplit));
  REQUIRE(r.status == 0);
  const auto report = eval::read_report_json(dir / "report.json");
  CHECK(report.avg_daily_rmse == 0.0);
  CHECK(report.windows == 9);
  CHECK(fs::exists(dir / "hourly_rmse.csv"));
  CHECK(fs::exists(dir / "predictions.csv"));
}

TEST_CASE("train is deterministic and evaluate accepts its checkpoint") {
  const fs::path dir = scratch("train");
  const fs::path series = make_series(dir, "0.3");
  auto train = [&](const std::string& out) {
    return run(cat({"train", "--model", "bilstm", "--units", "4", "--epochs", "3", "--batch-size", "64",
                    "--seed", "7", "--data", series.string(), "--out", (dir / out).string()},
                   kSplit));
  };
  REQUIRE(train("a").status == 0);
  REQUIRE(train("b").status == 0);
  for (const char* f : {"checkpoint.json", "history.csv"})
    CHECK(io::read_file(dir / "a" / f) == io::read_file(dir / "b" / f));
  auto snap_a = nlohmann::json::parse(io::read_file(dir / "a" / "train_config.json"));
  auto snap_b = nlohmann::json::parse(io::read_file(dir / "b" / "train_config.json"));
  snap_a.erase("out"), snap_b.erase("out");
  CHECK(snap_a == snap_b);

  const auto ev = run(cat({"evaluate", "--data", series.string(), "--out", (dir / "a").string()}, kSplit));
  REQUIRE(ev.status == 0);
  const auto first = io::read_file(dir / "a" / "report.json");
  REQUIRE(run(cat({"evaluate", "--data", series.string(), "--out", (dir / "a").string()}, kSplit)).status == 0);
  CHECK(io::read_file(dir / "a" / "report.json") == first);
  const auto report = eval::read_report_json(dir / "a" / "report.json");
  CHECK(report.model == "bilstm");
  CHECK(report.param_count == nn::param_count(nn::reference_spec(nn::ModelKind::bilstm, 4)));

  const auto naive = run(cat({"train", "--model", "naive", "--data", series.string(), "--out",
                              (dir / "n").string()}, kSplit));
  REQUIRE(naive.status == 0);
  CHECK(run(cat({"evaluate", "--data", series.string(), "--out", (dir / "n").string()}, kSplit)).status == 0);
}

TEST_CASE("evaluate without a checkpoint") {
  const fs::path dir = scratch("nockpt");
  const fs::path series = make_series(dir);
  const auto r = run(cat({"evaluate", "--model", "lstm", "--data", series.string(), "--out", dir.string()}, kSplit));
  CHECK(r.status == static_cast<int>(ErrorCode::BadConfig));
}

TEST_CASE("gridsearch") {
  const fs::path dir = scratch("grid");
  const fs::path series = make_series(dir);
  const auto r = run(cat({"gridsearch", "--model", "lstm", "--batch-sizes", "32,64", "--cells", "2,3",
                          "--epochs", "2", "--jobs", "2", "--data", series.string(), "--out", dir.string()},
                         kSplit));
  REQUIRE(r.status == 0);
  const std::string csv = io::read_file(dir / "grid.csv");
  CHECK(csv.rfind("batch_size,cells_2,cells_3\n32,", 0) == 0);
  CHECK(r.out.find("winner") != std::string::npos);
}

TEST_CASE("compare over cited report values") {
  const fs::path dir = scratch("compare");
  const std::vector<std::pair<std::string, std::string>> rows{
      {"naive", R"({"model":"naive","params":0,"avg_daily_rmse":1.787})"},
      {"lstm", R"({"model":"lstm","params":51001,"avg_daily_rmse":1.590})"},
      {"cnn-lstm", R"({"model":"cnn-lstm","params":332457,"avg_daily_rmse":1.545})"},
      {"bilstm", R"({"model":"bilstm","params":101801,"avg_daily_rmse":1.501})"},
      {"cnn-bilstm", R"({"model":"cnn-bilstm","params":664457,"avg_daily_rmse":1.541})"}};
  std::vector<std::string> args{"compare", "--reference", "bilstm", "--out", dir.string()};
  for (const auto& [name, body] : rows) {
    io::write_file_atomic(dir / (name + ".json"), body);
    args.push_back((dir / (name + ".json")).string());
  }
  const auto r = run(args);
  REQUIRE(r.status == 0);
  CHECK(io::read_file(dir / "comparison.csv") ==
        "model,params,avg_rmse_kw,improvement_pct\n"
        "naive,0,1.7870,16.00\n"
        "lstm,51001,1.5900,5.60\n"
        "cnn-lstm,332457,1.5450,2.85\n"
        "bilstm,101801,1.5010,\n"
        "cnn-bilstm,664457,1.5410,2.60\n");
  args[2] = "svm";
  CHECK(run(args).status == static_cast<int>(ErrorCode::UnknownReference));
}
