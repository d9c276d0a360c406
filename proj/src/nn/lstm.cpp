#include <cmath>

#include "engine.hpp"
#include "stlf/kernels.hpp"

namespace stlf::nn {
namespace {

inline double sigmoid(double x) {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

}  // namespace

void lstm_step(const LstmWeights& w, std::size_t batch, std::size_t inputs,
               std::size_t units, const double* x, const double* h_prev,
               const double* c_prev, double* gates, double* c, double* tanh_c,
               double* h) {
  const std::size_t g4 = 4 * units;
  for (std::size_t b = 0; b < batch; ++b)
    std::copy(w.bias, w.bias + g4, gates + b * g4);
  kernels::gemm_acc(batch, g4, inputs, x, inputs, w.kernel_x, g4, gates, g4);
  if (h_prev != nullptr)
    kernels::gemm_acc(batch, g4, units, h_prev, units, w.kernel_h, g4, gates, g4);

  for (std::size_t b = 0; b < batch; ++b) {
    double* z = gates + b * g4;
    for (std::size_t j = 0; j < units; ++j) {
      const double ig = sigmoid(z[j]);
      const double fg = sigmoid(z[units + j]);
      const double cg = std::tanh(z[2 * units + j]);
      const double og = sigmoid(z[3 * units + j]);
      z[j] = ig;
      z[units + j] = fg;
      z[2 * units + j] = cg;
      z[3 * units + j] = og;
      const std::size_t k = b * units + j;
      const double cell = c_prev != nullptr ? fg * c_prev[k] + ig * cg : ig * cg;
      c[k] = cell;
      tanh_c[k] = std::tanh(cell);
      h[k] = og * tanh_c[k];
    }
  }
}

void LstmCore::forward(const LstmWeights& w, const Activations& in) {
  steps_ = in.steps;
  batch_ = in.batch;
  const std::size_t g4 = 4 * units_;
  const std::size_t hs = batch_ * units_;
  gates_.resize(steps_ * batch_ * g4);
  cells_.resize(steps_ * hs);
  tanh_c_.resize(steps_ * hs);
  hidden_.resize(steps_ * hs);
  for (std::size_t s = 0; s < steps_; ++s) {
    const std::size_t t = reverse_ ? steps_ - 1 - s : s;
    const double* h_prev = nullptr;
    const double* c_prev = nullptr;
    if (s > 0) {
      const std::size_t tp = reverse_ ? t + 1 : t - 1;
      h_prev = hidden_.data() + tp * hs;
      c_prev = cells_.data() + tp * hs;
    }
    lstm_step(w, batch_, inputs_, units_, in.step(t), h_prev, c_prev,
              gates_.data() + t * batch_ * g4, cells_.data() + t * hs,
              tanh_c_.data() + t * hs, hidden_.data() + t * hs);
  }
}

void LstmCore::backward(const LstmWeights& w, const Activations& in, const double* dh,
                        double* grad, Activations* din) {
  const std::size_t g4 = 4 * units_;
  const std::size_t hs = batch_ * units_;
  double* g_kx = grad;
  double* g_kh = grad + inputs_ * g4;
  double* g_b = g_kh + units_ * g4;

  kx_t_.resize(g4 * inputs_);
  kh_t_.resize(g4 * units_);
  kernels::transpose(inputs_, g4, w.kernel_x, g4, kx_t_.data(), inputs_);
  kernels::transpose(units_, g4, w.kernel_h, g4, kh_t_.data(), units_);
  dz_.resize(batch_ * g4);
  dh_next_.assign(hs, 0.0);
  dc_next_.assign(hs, 0.0);

  for (std::size_t s = steps_; s-- > 0;) {
    const std::size_t t = reverse_ ? steps_ - 1 - s : s;
    const bool has_prev = s > 0;
    const std::size_t tp = reverse_ ? t + 1 : t - 1;
    const double* gates = gates_.data() + t * batch_ * g4;
    const double* tc = tanh_c_.data() + t * hs;
    const double* c_prev = has_prev ? cells_.data() + tp * hs : nullptr;
    const double* dh_t = dh + t * hs;

    for (std::size_t b = 0; b < batch_; ++b) {
      const double* z = gates + b * g4;
      double* dz = dz_.data() + b * g4;
      for (std::size_t j = 0; j < units_; ++j) {
        const std::size_t k = b * units_ + j;
        const double ig = z[j], fg = z[units_ + j], cg = z[2 * units_ + j],
                     og = z[3 * units_ + j];
        const double dhk = dh_t[k] + dh_next_[k];
        const double dc = dc_next_[k] + dhk * og * (1.0 - tc[k] * tc[k]);
        const double d_o = dhk * tc[k];
        const double d_i = dc * cg;
        const double d_c = dc * ig;
        const double d_f = has_prev ? dc * c_prev[k] : 0.0;
        dc_next_[k] = dc * fg;
        dz[j] = d_i * ig * (1.0 - ig);
        dz[units_ + j] = d_f * fg * (1.0 - fg);
        dz[2 * units_ + j] = d_c * (1.0 - cg * cg);
        dz[3 * units_ + j] = d_o * og * (1.0 - og);
      }
    }

    kernels::gemm_tn_acc(batch_, g4, inputs_, in.step(t), inputs_, dz_.data(), g4, g_kx, g4);
    if (has_prev)
      kernels::gemm_tn_acc(batch_, g4, units_, hidden_.data() + tp * hs, units_,
                           dz_.data(), g4, g_kh, g4);
    kernels::col_sum_acc(batch_, g4, dz_.data(), g4, g_b);
    if (din != nullptr)
      kernels::gemm_acc(batch_, inputs_, g4, dz_.data(), g4, kx_t_.data(), inputs_,
                        din->step(t), inputs_);
    std::fill(dh_next_.begin(), dh_next_.end(), 0.0);
    if (has_prev)
      kernels::gemm_acc(batch_, units_, g4, dz_.data(), g4, kh_t_.data(), units_,
                        dh_next_.data(), units_);
  }
}

}  // namespace stlf::nn
