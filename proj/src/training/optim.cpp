#include <cmath>
#include <string>

#include "stlf/error.hpp"
#include "stlf/kernels.hpp"
#include "stlf/training.hpp"

namespace stlf::training {

void TrainConfig::validate() const {
  auto bad = [](const std::string& what) { throw Error(ErrorCode::InvalidConfig, what); };
  if (!(learning_rate > 0.0) || !std::isfinite(learning_rate)) bad("learning_rate must be > 0");
  if (!(beta1 >= 0.0 && beta1 < 1.0)) bad("beta1 must lie in [0, 1)");
  if (!(beta2 >= 0.0 && beta2 < 1.0)) bad("beta2 must lie in [0, 1)");
  if (!(epsilon > 0.0)) bad("epsilon must be > 0");
  if (batch_size < 1) bad("batch_size must be >= 1");
  if (patience < 1) bad("patience must be >= 1");
}

LossResult mse_loss(std::span<const double> pred, std::span<const double> target) {
  if (pred.size() != target.size())
    throw Error(ErrorCode::LengthMismatch, "prediction and target lengths differ");
  if (pred.empty()) throw Error(ErrorCode::Empty, "empty profile");
  const double n = static_cast<double>(pred.size());
  LossResult r;
  r.grad.resize(pred.size());
  double acc = 0.0;
  for (std::size_t i = 0; i < pred.size(); ++i) {
    const double e = pred[i] - target[i];
    acc += e * e;
    r.grad[i] = 2.0 * e / n;
  }
  r.loss = acc / n;
  return r;
}

double rmse(std::span<const double> pred, std::span<const double> target) {
  if (pred.size() != target.size())
    throw Error(ErrorCode::LengthMismatch, "prediction and target lengths differ");
  if (pred.empty()) throw Error(ErrorCode::Empty, "rmse of empty sequences");
  double acc = 0.0;
  for (std::size_t i = 0; i < pred.size(); ++i) {
    const double e = target[i] - pred[i];
    acc += e * e;
  }
  return std::sqrt(acc / static_cast<double>(pred.size()));
}

void adam_step(std::span<double> params, std::span<const double> grads, AdamState& state,
               const TrainConfig& cfg) {
  if (params.size() != grads.size() || state.m.size() != params.size() ||
      state.v.size() != params.size())
    throw Error(ErrorCode::LengthMismatch, "adam_step vectors differ in length");
  state.t += 1;
  const double t = static_cast<double>(state.t);
  const double c1 = 1.0 - std::pow(cfg.beta1, t);
  const double c2 = 1.0 - std::pow(cfg.beta2, t);
  kernels::adam_update(params.size(), params.data(), grads.data(), state.m.data(),
                       state.v.data(), cfg.learning_rate, cfg.beta1, cfg.beta2, c1, c2,
                       cfg.epsilon);
}

bool EarlyStopping::update(std::size_t epoch, double loss) {
  if (!seen_ || loss < best_) {
    seen_ = true;
    best_ = loss;
    best_epoch_ = epoch;
    since_best_ = 0;
    return true;
  }
  ++since_best_;
  return false;
}

}  // namespace stlf::training
