#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <string>

#include "stlf/error.hpp"
#include "stlf/io.hpp"
#include "stlf/training.hpp"

namespace stlf::training {
namespace {

void check_dataset(const data::WindowedDataset& ds, const char* which) {
  if (ds.size() == 0)
    throw Error(ErrorCode::EmptyDataset, std::string(which) + " dataset is empty");
  if (ds.in_len != nn::kHorizon || ds.out_len != nn::kHorizon)
    throw Error(ErrorCode::ShapeMismatch,
                std::string(which) + " dataset must hold 24-hour inputs and targets");
}

void check_finite(double loss, std::size_t epoch, const char* which) {
  if (!std::isfinite(loss))
    throw Error(ErrorCode::DivergedLoss, std::string(which) + " loss became non-finite at epoch " +
                                             std::to_string(epoch));
}

}  // namespace

double TrainRun::best_valid_loss() const {
  if (valid_loss.empty()) return initial_valid_loss;
  return *std::min_element(valid_loss.begin(), valid_loss.end());
}

double dataset_loss(nn::Network& net, std::span<const double> params,
                    const data::WindowedDataset& ds, std::size_t batch) {
  const std::size_t n = ds.size();
  const std::size_t h = nn::kHorizon;
  double total = 0.0;
  for (std::size_t first = 0; first < n; first += batch) {
    const std::size_t b = std::min(batch, n - first);
    const auto out = net.forward(
        params, std::span<const double>(ds.inputs).subspan(first * h, b * h), b);
    for (std::size_t i = 0; i < b * h; ++i) {
      const double e = out[i] - ds.targets[first * h + i];
      total += e * e;
    }
  }
  return total / static_cast<double>(n * h);
}

TrainRun train_model(const nn::ModelSpec& spec, const data::WindowedDataset& train,
                     const data::WindowedDataset& valid, const TrainConfig& cfg) {
  return train_model(spec, nn::init_params(spec, cfg.seed), train, valid, cfg);
}

TrainRun train_model(const nn::ModelSpec& spec, nn::ParamStore initial,
                     const data::WindowedDataset& train, const data::WindowedDataset& valid,
                     const TrainConfig& cfg) {
  cfg.validate();
  check_dataset(train, "training");
  check_dataset(valid, "validation");
  nn::Network net(spec);
  if (initial.size() != net.param_count())
    throw Error(ErrorCode::ShapeMismatch, "initial parameters do not match the spec");

  TrainRun run;
  run.seed = cfg.seed;
  run.best_params = initial;
  if (cfg.max_epochs == 0) return run;

  nn::ParamStore params = std::move(initial);
  params.grads.assign(params.size(), 0.0);
  AdamState adam = AdamState::zeros(params.size());
  EarlyStopping stopper(cfg.patience);

  run.initial_train_loss = dataset_loss(net, params.values, train);
  run.initial_valid_loss = dataset_loss(net, params.values, valid);

  const std::size_t n = train.size();
  const std::size_t h = nn::kHorizon;
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  // Shuffling uses its own stream so it does not depend on how many draws
  // initialization consumed.
  std::mt19937_64 rng(cfg.seed ^ 0x9e3779b97f4a7c15ULL);
  std::vector<double> batch_in, batch_target, upstream;

  for (std::size_t epoch = 1; epoch <= cfg.max_epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng);
    double epoch_sum = 0.0;
    for (std::size_t first = 0; first < n; first += cfg.batch_size) {
      const std::size_t b = std::min(cfg.batch_size, n - first);
      batch_in.resize(b * h);
      batch_target.resize(b * h);
      for (std::size_t k = 0; k < b; ++k) {
        const auto in = train.input(order[first + k]);
        const auto tg = train.target(order[first + k]);
        std::copy(in.begin(), in.end(), batch_in.begin() + static_cast<std::ptrdiff_t>(k * h));
        std::copy(tg.begin(), tg.end(), batch_target.begin() + static_cast<std::ptrdiff_t>(k * h));
      }
      const auto out = net.forward(params.values, batch_in, b);
      // Batch loss is the mean over samples of the per-profile MSE, so each
      // output's gradient is 2 (y - t) / (24 b).
      upstream.resize(b * h);
      const double scale = 2.0 / static_cast<double>(h * b);
      double sq = 0.0;
      for (std::size_t i = 0; i < b * h; ++i) {
        const double e = out[i] - batch_target[i];
        sq += e * e;
        upstream[i] = scale * e;
      }
      epoch_sum += sq / static_cast<double>(h);
      params.zero_grads();
      net.backward(params.values, upstream, params.grads);
      adam_step(params.values, params.grads, adam, cfg);
    }
    const double train_loss = epoch_sum / static_cast<double>(n);
    check_finite(train_loss, epoch, "training");
    const double valid_loss = dataset_loss(net, params.values, valid);
    check_finite(valid_loss, epoch, "validation");
    run.train_loss.push_back(train_loss);
    run.valid_loss.push_back(valid_loss);
    run.stopped_epoch = epoch;
    if (stopper.update(epoch, valid_loss)) run.best_params.values = params.values;
    if (stopper.should_stop()) break;
  }
  run.best_epoch = stopper.best_epoch();
  run.best_params.grads.assign(run.best_params.size(), 0.0);
  return run;
}

void write_history_csv(const std::filesystem::path& path, const TrainRun& run) {
  std::string out = "epoch,train_loss,valid_loss\n";
  out += "0," + io::format_double(run.initial_train_loss) + "," +
         io::format_double(run.initial_valid_loss) + "\n";
  for (std::size_t e = 0; e < run.train_loss.size(); ++e)
    out += std::to_string(e + 1) + "," + io::format_double(run.train_loss[e]) + "," +
           io::format_double(run.valid_loss[e]) + "\n";
  io::write_file_atomic(path, out);
}

}  // namespace stlf::training
