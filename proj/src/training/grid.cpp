#include <algorithm>
#include <atomic>
#include <cstdio>
#include <thread>

#include "stlf/error.hpp"
#include "stlf/eval.hpp"
#include "stlf/io.hpp"
#include "stlf/training.hpp"

namespace stlf::training {
namespace {

void run_cell(GridCell& cell, nn::ModelKind kind, const data::WindowedDataset& train,
              const data::WindowedDataset& valid, const data::LoadSeries& test,
              const TrainConfig& base) {
  try {
    TrainConfig cfg = base;
    cfg.batch_size = cell.batch_size;
    cfg.seed = cell.seed;
    const nn::ModelSpec spec = nn::reference_spec(kind, cell.cells);
    TrainRun run = train_model(spec, train, valid, cfg);
    const auto model = eval::network_model(std::string(nn::model_kind_name(kind)), spec,
                                           std::move(run.best_params.values), train.norm);
    cell.rmse = eval::walk_forward_eval(model, test).avg_daily_rmse;
  } catch (const std::exception& e) {
    cell.failure = e.what();
  }
}

}  // namespace

GridSearchResult grid_search(const GridSpec& grid, nn::ModelKind kind,
                             const data::WindowedDataset& train,
                             const data::WindowedDataset& valid, const data::LoadSeries& test,
                             const TrainConfig& base, std::size_t jobs) {
  if (grid.batch_sizes.empty() || grid.cell_counts.empty())
    throw Error(ErrorCode::InvalidConfig, "grid search needs at least one batch size and cell count");
  if (kind == nn::ModelKind::naive)
    throw Error(ErrorCode::InvalidConfig, "the naive model has no hyperparameters to search");
  base.validate();

  GridSearchResult r;
  r.batch_sizes = grid.batch_sizes;
  r.cell_counts = grid.cell_counts;
  for (std::size_t i = 0; i < grid.batch_sizes.size(); ++i)
    for (std::size_t j = 0; j < grid.cell_counts.size(); ++j) {
      GridCell c;
      c.batch_size = grid.batch_sizes[i];
      c.cells = grid.cell_counts[j];
      c.seed = base.seed + r.cells.size();
      r.cells.push_back(c);
    }

  // Cells share only read-only inputs, so any schedule gives the same table.
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t k; (k = next.fetch_add(1)) < r.cells.size();)
      run_cell(r.cells[k], kind, train, valid, test, base);
  };
  const std::size_t n_threads = std::clamp<std::size_t>(jobs, 1, r.cells.size());
  std::vector<std::thread> pool;
  for (std::size_t t = 1; t < n_threads; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();

  for (std::size_t k = 0; k < r.cells.size(); ++k) {
    const GridCell& c = r.cells[k];
    if (!c.rmse) continue;
    if (!r.winner) {
      r.winner = k;
      continue;
    }
    const GridCell& w = r.cells[*r.winner];
    const bool better =
        *c.rmse < *w.rmse ||
        (*c.rmse == *w.rmse &&
         (c.cells < w.cells || (c.cells == w.cells && c.batch_size < w.batch_size)));
    if (better) r.winner = k;
  }
  return r;
}

std::string grid_csv(const GridSearchResult& r) {
  std::string out = "batch_size";
  for (std::size_t c : r.cell_counts) out += ",cells_" + std::to_string(c);
  out += "\n";
  char buf[32];
  for (std::size_t i = 0; i < r.batch_sizes.size(); ++i) {
    out += std::to_string(r.batch_sizes[i]);
    for (std::size_t j = 0; j < r.cell_counts.size(); ++j) {
      const GridCell& c = r.cells[i * r.cell_counts.size() + j];
      out += ",";
      if (c.rmse) {
        std::snprintf(buf, sizeof buf, "%.4f", *c.rmse);
        out += buf;
      }
    }
    out += "\n";
  }
  return out;
}

void write_grid_csv(const std::filesystem::path& path, const GridSearchResult& r) {
  io::write_file_atomic(path, grid_csv(r));
}

}  // namespace stlf::training
