#include <algorithm>
#include <filesystem>
#include <functional>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "stlf/cli.hpp"
#include "stlf/error.hpp"
#include "stlf/eval.hpp"
#include "stlf/io.hpp"
#include "stlf/kernels.hpp"
#include "stlf/nn/checkpoint.hpp"

namespace stlf::cli {
namespace fs = std::filesystem;

namespace {

// Flag values; each one set on the command line overrides the config file.
struct Flags {
  std::optional<std::string> config, out, data, layout, model, train_end, valid_end, start,
      checkpoint, reference;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> jobs, units, epochs, batch_size, patience, days, period;
  std::optional<double> lr, amp, noise, trend, base;
  std::vector<std::size_t> batch_sizes, cell_counts;
  std::vector<std::string> reports;
};

RunConfig resolve(const Flags& f) {
  RunConfig c = f.config ? load_config(*f.config) : RunConfig{};
  // Route flag overrides through the same validation as the file.
  nlohmann::json j = config_to_json(c);
  if (f.out) j["out"] = *f.out;
  if (f.seed) j["seed"] = *f.seed;
  if (f.jobs) j["jobs"] = *f.jobs;
  if (f.data) j["data"]["path"] = *f.data;
  if (f.layout) j["data"]["layout"] = *f.layout;
  if (f.model) j["model"] = *f.model;
  if (f.units) j["units"] = *f.units;
  if (f.train_end) j["split"]["train_end"] = *f.train_end;
  if (f.valid_end) j["split"]["valid_end"] = *f.valid_end;
  if (f.epochs) j["train"]["max_epochs"] = *f.epochs;
  if (f.batch_size) j["train"]["batch_size"] = *f.batch_size;
  if (f.patience) j["train"]["patience"] = *f.patience;
  if (f.lr) j["train"]["learning_rate"] = *f.lr;
  if (!f.batch_sizes.empty()) j["grid"]["batch_sizes"] = f.batch_sizes;
  if (!f.cell_counts.empty()) j["grid"]["cell_counts"] = f.cell_counts;
  if (f.days) j["synth"]["days"] = *f.days;
  if (f.amp) j["synth"]["seasonal_amp"] = *f.amp;
  if (f.noise) j["synth"]["noise_sd"] = *f.noise;
  if (f.trend) j["synth"]["trend_slope"] = *f.trend;
  if (f.base) j["synth"]["base"] = *f.base;
  if (f.start) j["synth"]["start"] = *f.start;
  c = config_from_json(j);
  c.train.seed = c.seed;
  c.synth.seed = c.seed;
  return c;
}

data::LoadSeries load_series(const RunConfig& c) {
  if (c.data_path.empty())
    throw Error(ErrorCode::BadConfig, "no input series: pass --data or set data.path");
  return data::parse_load_csv(c.data_path, c.layout);
}

void snapshot(const RunConfig& c, const std::string& command) {
  io::write_file_atomic(fs::path(c.out) / (command + "_config.json"),
                        config_to_json(c).dump(2) + "\n");
}

std::string fixed(double v, int digits) {
  std::ostringstream s;
  s.setf(std::ios::fixed);
  s.precision(digits);
  s << v;
  return s.str();
}

struct Prepared {
  data::SplitSeries split;
  data::NormParams norm;
  data::WindowedDataset train, valid;
};

Prepared prepare(const RunConfig& c) {
  Prepared p;
  p.split = data::split_by_date(load_series(c), c.split);
  p.norm = data::fit_minmax(p.split.train);
  const auto norm_train = data::transform_minmax(p.split.train.values, p.norm, data::Direction::apply);
  const auto norm_valid = data::transform_minmax(p.split.valid.values, p.norm, data::Direction::apply);
  p.train = data::build_windows(norm_train, nn::kHorizon, nn::kHorizon, 1, p.norm);
  p.valid = data::build_windows(norm_valid, nn::kHorizon, nn::kHorizon, 1, p.norm);
  return p;
}

void do_ingest(const RunConfig& c, std::ostream& out) {
  data::IngestStats stats;
  if (c.data_path.empty())
    throw Error(ErrorCode::BadConfig, "no input series: pass --data or set data.path");
  const auto s = data::parse_load_csv(c.data_path, c.layout, &stats);
  const auto [lo, hi] = std::minmax_element(s.values.begin(), s.values.end());
  out << "rows " << stats.rows << "\n"
      << "households " << stats.households << "\n"
      << "interpolated_hours " << stats.interpolated << "\n"
      << "hours " << s.size() << "\n"
      << "start " << data::format_timestamp(s.start) << "\n"
      << "end " << data::format_timestamp(s.time_at(s.size() - 1)) << "\n"
      << "min_kw " << io::format_double(*lo) << "\n"
      << "max_kw " << io::format_double(*hi) << "\n"
      << "mean_kw " << io::format_double(eval::mean(s.values)) << "\n";
  try {
    const auto parts = data::split_by_date(s, c.split);
    out << "train_hours " << parts.train.size() << "\n"
        << "valid_hours " << parts.valid.size() << "\n"
        << "test_hours " << parts.test.size() << "\n";
  } catch (const Error& e) {
    out << "split unavailable: " << e.what() << "\n";
  }
  data::write_series_csv(fs::path(c.out) / "series.csv", s);
}

void do_decompose(const RunConfig& c, std::size_t period, std::ostream& out) {
  const auto s = load_series(c);
  const auto d = data::decompose_additive(s, period);
  const fs::path path = fs::path(c.out) / "decomposition.csv";
  data::write_decomposition_csv(path, s, d);
  out << "wrote " << path.string() << "\n";
}

void do_synth(const RunConfig& c, std::ostream& out) {
  const auto s = data::generate_synthetic(c.synth);
  const fs::path path = fs::path(c.out) / "series.csv";
  data::write_series_csv(path, s);
  snapshot(c, "synth");
  out << "wrote " << path.string() << " (" << s.size() << " hours)\n";
}

void do_train(const RunConfig& c, std::ostream& out) {
  const Prepared p = prepare(c);
  nn::Checkpoint ck;
  ck.kind = c.model;
  ck.seed = c.seed;
  ck.norm = p.norm;
  training::TrainRun run;
  if (c.model != nn::ModelKind::naive) {
    const nn::ModelSpec spec = nn::reference_spec(c.model, c.units);
    run = training::train_model(spec, p.train, p.valid, c.train);
    ck.spec = spec;
    ck.params = run.best_params.values;
  }
  snapshot(c, "train");
  nn::save_checkpoint(fs::path(c.out) / "checkpoint.json", ck);
  training::write_history_csv(fs::path(c.out) / "history.csv", run);
  out << "model " << nn::model_kind_name(c.model) << "\n"
      << "params " << ck.params.size() << "\n"
      << "epochs " << run.stopped_epoch << "\n"
      << "best_epoch " << run.best_epoch << "\n";
  if (!run.valid_loss.empty()) out << "best_valid_loss " << io::format_double(run.best_valid_loss()) << "\n";
}

void do_evaluate(const RunConfig& c, const Flags& f, std::ostream& out) {
  const auto split = data::split_by_date(load_series(c), c.split);
  std::optional<fs::path> ck_path;
  if (f.checkpoint)
    ck_path = *f.checkpoint;
  else if (!(f.model && c.model == nn::ModelKind::naive) &&
           fs::exists(fs::path(c.out) / "checkpoint.json"))
    ck_path = fs::path(c.out) / "checkpoint.json";

  eval::EvalReport r;
  if (ck_path) {
    const nn::Checkpoint ck = nn::load_checkpoint(*ck_path);
    if (ck.kind == nn::ModelKind::naive) {
      r = eval::naive_report(split.test);
      r.norm = ck.norm;
    } else {
      const auto model = eval::network_model(std::string(nn::model_kind_name(ck.kind)), *ck.spec,
                                             ck.params, ck.norm);
      r = eval::walk_forward_eval(model, split.test);
    }
    r.checkpoint = ck_path->string();
  } else if (c.model == nn::ModelKind::naive) {
    r = eval::naive_report(split.test);
  } else {
    throw Error(ErrorCode::BadConfig,
                "evaluating a trained model needs --checkpoint or <out>/checkpoint.json");
  }
  snapshot(c, "evaluate");
  eval::write_report_json(fs::path(c.out) / "report.json", r);
  eval::write_profile_csv(fs::path(c.out) / "hourly_rmse.csv", r);
  eval::write_predictions_csv(fs::path(c.out) / "predictions.csv", r);
  if (r.dropped_leading + r.dropped_trailing > 0)
    out << "warning: dropped " << r.dropped_leading << " leading and " << r.dropped_trailing
        << " trailing hours outside whole days\n";
  out << "model " << r.model << "\n"
      << "windows " << r.windows << "\n"
      << "avg_daily_rmse_kw " << io::format_double(r.avg_daily_rmse) << "\n";
}

void do_gridsearch(const RunConfig& c, std::ostream& out) {
  const Prepared p = prepare(c);
  const auto result =
      training::grid_search(c.grid, c.model, p.train, p.valid, p.split.test, c.train, c.jobs);
  snapshot(c, "gridsearch");
  training::write_grid_csv(fs::path(c.out) / "grid.csv", result);
  out << training::grid_csv(result);
  for (const auto& cell : result.cells)
    if (!cell.rmse)
      out << "failed batch " << cell.batch_size << " cells " << cell.cells << ": " << cell.failure
          << "\n";
  if (result.winner) {
    const auto& w = result.cells[*result.winner];
    out << "winner batch " << w.batch_size << " cells " << w.cells << " rmse "
        << fixed(*w.rmse, 4) << "\n";
  }
}

void do_compare(const RunConfig& c, const Flags& f, std::ostream& out) {
  if (f.reports.empty()) throw Error(ErrorCode::BadConfig, "compare needs at least one report");
  std::vector<eval::EvalReport> reports;
  for (const auto& path : f.reports) reports.push_back(eval::read_report_json(path));
  const std::string reference = f.reference ? *f.reference : std::string(nn::model_kind_name(c.model));
  const auto table = eval::compare_models(reports, reference);
  eval::write_comparison_csv(fs::path(c.out) / "comparison.csv", table);
  out << eval::comparison_csv(table);
}

std::string exit_code_help() {
  std::string s = "Exit status:\n  0   success\n  1   unexpected internal failure\n  2   usage error\n";
  for (int code = 10; code <= 52; ++code) {
    const auto name = error_name(static_cast<ErrorCode>(code));
    if (name != "Unknown") s += "  " + std::to_string(code) + "  " + std::string(name) + "\n";
  }
  return s;
}

}  // namespace

int run_command(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Day-ahead household electricity load forecasting"};
  app.name("stlf");
  app.require_subcommand(1);
  app.footer(exit_code_help());
  Flags f;

  auto common = [&](CLI::App* sub) {
    sub->add_option("--config", f.config, "JSON run configuration")->check(CLI::ExistingFile);
    sub->add_option("--out", f.out, "Output directory");
    sub->add_option("--seed", f.seed, "Random seed");
    sub->add_option("--jobs", f.jobs, "Parallel workers");
  };
  auto input = [&](CLI::App* sub) {
    sub->add_option("--data", f.data, "Hourly load CSV");
    sub->add_option("--layout", f.layout, "aggregated or per_household");
  };
  auto split = [&](CLI::App* sub) {
    sub->add_option("--train-end", f.train_end, "Last training day, YYYY-MM-DD");
    sub->add_option("--valid-end", f.valid_end, "Last validation day, YYYY-MM-DD");
  };
  auto trainer = [&](CLI::App* sub) {
    sub->add_option("--model", f.model, "naive, lstm, bilstm, cnn-lstm or cnn-bilstm");
    sub->add_option("--units", f.units, "Recurrent width (0 = model default)");
    sub->add_option("--epochs", f.epochs, "Maximum epochs");
    sub->add_option("--batch-size", f.batch_size, "Mini-batch size");
    sub->add_option("--patience", f.patience, "Early-stopping patience");
    sub->add_option("--lr", f.lr, "Adam learning rate");
  };

  auto* ingest = app.add_subcommand("ingest", "Validate a load CSV and print series statistics");
  common(ingest), input(ingest), split(ingest);
  auto* decompose = app.add_subcommand("decompose", "Write the additive decomposition CSV");
  common(decompose), input(decompose);
  decompose->add_option("--period", f.period, "Seasonal period in hours (default 24)");
  auto* synth = app.add_subcommand("synth", "Write a synthetic hourly series");
  common(synth);
  synth->add_option("--days", f.days, "Length in days");
  synth->add_option("--amp", f.amp, "Daily shape amplitude, kW");
  synth->add_option("--noise", f.noise, "Gaussian noise sd, kW");
  synth->add_option("--trend", f.trend, "Trend slope, kW per day");
  synth->add_option("--base", f.base, "Base load, kW");
  synth->add_option("--start", f.start, "First day, YYYY-MM-DD");
  auto* train = app.add_subcommand("train", "Train a model; writes checkpoint and history");
  common(train), input(train), split(train), trainer(train);
  auto* evaluate = app.add_subcommand("evaluate", "Walk-forward evaluation on the test span");
  common(evaluate), input(evaluate), split(evaluate);
  evaluate->add_option("--model", f.model, "naive, or the kind recorded in the checkpoint");
  evaluate->add_option("--checkpoint", f.checkpoint, "Checkpoint to evaluate");
  auto* grid = app.add_subcommand("gridsearch", "Batch size x cell count search");
  common(grid), input(grid), split(grid), trainer(grid);
  grid->add_option("--batch-sizes", f.batch_sizes, "Batch sizes to try")->delimiter(',');
  grid->add_option("--cells", f.cell_counts, "Cell counts to try")->delimiter(',');
  auto* compare = app.add_subcommand("compare", "Comparison table from report files");
  common(compare);
  compare->add_option("--reference", f.reference, "Reference model name (default: config model)");
  compare->add_option("reports", f.reports, "report.json files")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "stlf: usage error: " << e.what() << "\n";
    return 2;
  }

  try {
    const RunConfig c = resolve(f);
    if (*ingest) do_ingest(c, out);
    if (*decompose) do_decompose(c, f.period.value_or(24), out);
    if (*synth) do_synth(c, out);
    if (*train) do_train(c, out);
    if (*evaluate) do_evaluate(c, f, out);
    if (*grid) do_gridsearch(c, out);
    if (*compare) do_compare(c, f, out);
    return 0;
  } catch (const Error& e) {
    err << "stlf: error[" << error_name(e.code()) << "]: " << e.what() << "\n";
    return static_cast<int>(e.code());
  } catch (const std::exception& e) {
    err << "stlf: internal error: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace stlf::cli
