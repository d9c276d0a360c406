#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "stlf/data.hpp"
#include "stlf/nn/model.hpp"

namespace stlf::training {

struct TrainConfig {
  double learning_rate = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  std::size_t batch_size = 384;
  std::size_t max_epochs = 150;
  std::size_t patience = 10;
  std::uint64_t seed = 0;

  // Throws InvalidConfig.
  void validate() const;
};

struct LossResult {
  double loss = 0.0;
  std::vector<double> grad;  // d loss / d pred
};

// Mean squared error over one profile, with its gradient.
LossResult mse_loss(std::span<const double> pred, std::span<const double> target);

// sqrt(mean((pred - target)^2))
double rmse(std::span<const double> pred, std::span<const double> target);

struct AdamState {
  std::vector<double> m;
  std::vector<double> v;
  std::uint64_t t = 0;

  static AdamState zeros(std::size_t n) { return {std::vector<double>(n, 0.0), std::vector<double>(n, 0.0), 0}; }
};

void adam_step(std::span<double> params, std::span<const double> grads, AdamState& state,
               const TrainConfig& cfg);

// Stops once `patience` consecutive epochs fail to improve (strictly) on the
// best validation loss.
class EarlyStopping {
 public:
  explicit EarlyStopping(std::size_t patience) : patience_(patience) {}

  // Returns true when `loss` is a new best.
  bool update(std::size_t epoch, double loss);
  bool should_stop() const { return since_best_ >= patience_; }
  std::size_t best_epoch() const { return best_epoch_; }
  double best_loss() const { return best_; }

 private:
  std::size_t patience_;
  std::size_t since_best_ = 0;
  std::size_t best_epoch_ = 0;
  double best_ = 0.0;
  bool seen_ = false;
};

struct TrainRun {
  nn::ParamStore best_params;
  std::vector<double> train_loss;  // epoch 1..stopped_epoch
  std::vector<double> valid_loss;
  double initial_train_loss = 0.0;  // before the first update
  double initial_valid_loss = 0.0;
  std::size_t stopped_epoch = 0;
  std::size_t best_epoch = 0;
  std::uint64_t seed = 0;

  double best_valid_loss() const;
};

// Mean per-sample MSE of the network over a dataset (normalized units).
double dataset_loss(nn::Network& net, std::span<const double> params,
                    const data::WindowedDataset& ds, std::size_t batch = 512);

TrainRun train_model(const nn::ModelSpec& spec, const data::WindowedDataset& train,
                     const data::WindowedDataset& valid, const TrainConfig& cfg);

// Same, starting from the given parameters instead of init_params(spec, seed).
TrainRun train_model(const nn::ModelSpec& spec, nn::ParamStore initial,
                     const data::WindowedDataset& train, const data::WindowedDataset& valid,
                     const TrainConfig& cfg);

void write_history_csv(const std::filesystem::path& path, const TrainRun& run);

struct GridCell {
  std::size_t batch_size = 0;
  std::size_t cells = 0;
  std::uint64_t seed = 0;
  std::optional<double> rmse;  // average daily RMSE on the test span, kW
  std::string failure;
};

struct GridSearchResult {
  std::vector<std::size_t> batch_sizes;
  std::vector<std::size_t> cell_counts;
  std::vector<GridCell> cells;  // batch-major: cells[i * cell_counts.size() + j]
  std::optional<std::size_t> winner;
};

struct GridSpec {
  std::vector<std::size_t> batch_sizes{96, 192, 384};
  std::vector<std::size_t> cell_counts{150, 200, 400};
};

// Trains one model per grid cell (seed = base.seed + cell index), scores it
// by walk-forward evaluation on `test`, and picks the lowest RMSE (ties: fewer
// cells, then smaller batch). Failed cells keep their reason and are skipped.
GridSearchResult grid_search(const GridSpec& grid, nn::ModelKind kind,
                             const data::WindowedDataset& train,
                             const data::WindowedDataset& valid,
                             const data::LoadSeries& test, const TrainConfig& base,
                             std::size_t jobs = 1);

std::string grid_csv(const GridSearchResult& r);
void write_grid_csv(const std::filesystem::path& path, const GridSearchResult& r);

}  // namespace stlf::training
