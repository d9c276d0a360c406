#include <algorithm>
#include <cmath>

#include "engine.hpp"
#include "stlf/error.hpp"
#include "stlf/kernels.hpp"

namespace stlf::nn {

void activate(Activation act, double* x, std::size_t n) {
  switch (act) {
    case Activation::linear:
      return;
    case Activation::relu:
      for (std::size_t i = 0; i < n; ++i) x[i] = x[i] > 0.0 ? x[i] : 0.0;
      return;
    case Activation::sigmoid:
      for (std::size_t i = 0; i < n; ++i) {
        if (x[i] >= 0.0) {
          x[i] = 1.0 / (1.0 + std::exp(-x[i]));
        } else {
          const double e = std::exp(x[i]);
          x[i] = e / (1.0 + e);
        }
      }
      return;
    case Activation::tanh:
      for (std::size_t i = 0; i < n; ++i) x[i] = std::tanh(x[i]);
      return;
  }
}

void activation_grad(Activation act, const double* y, const double* dy, double* dz,
                     std::size_t n) {
  switch (act) {
    case Activation::linear:
      std::copy(dy, dy + n, dz);
      return;
    case Activation::relu:
      // relu'(0) is taken as 0
      for (std::size_t i = 0; i < n; ++i) dz[i] = y[i] > 0.0 ? dy[i] : 0.0;
      return;
    case Activation::sigmoid:
      for (std::size_t i = 0; i < n; ++i) dz[i] = dy[i] * y[i] * (1.0 - y[i]);
      return;
    case Activation::tanh:
      for (std::size_t i = 0; i < n; ++i) dz[i] = dy[i] * (1.0 - y[i] * y[i]);
      return;
  }
}

void maxpool_forward(const Activations& in, std::size_t size, Activations& out,
                     std::vector<std::size_t>& argmax) {
  if (in.steps < size)
    throw Error(ErrorCode::WindowLargerThanInput, "pool window longer than input");
  const std::size_t t_out = in.steps / size;
  const std::size_t row = in.batch * in.channels;
  out.resize(t_out, in.batch, in.channels);
  argmax.resize(t_out * row);
  for (std::size_t t = 0; t < t_out; ++t) {
    for (std::size_t k = 0; k < row; ++k) {
      std::size_t best_t = t * size;
      double best = in.step(best_t)[k];
      for (std::size_t j = 1; j < size; ++j) {
        const double v = in.step(t * size + j)[k];
        if (v > best) {  // strict: ties keep the earliest index
          best = v;
          best_t = t * size + j;
        }
      }
      out.step(t)[k] = best;
      argmax[t * row + k] = best_t;
    }
  }
}

namespace {

// Dense over the last axis; rows = steps * batch. Covers both Dense on a
// flat vector and TimeDistributedDense on a sequence.
class DenseLayer final : public LayerImpl {
 public:
  DenseLayer(std::size_t in, std::size_t units, Activation act)
      : in_(in), units_(units), act_(act) {}

  void forward(const double* p, const Activations& in, Activations& out) override {
    const std::size_t rows = in.steps * in.batch;
    out.resize(in.steps, in.batch, units_);
    const double* kernel = p;
    const double* bias = p + in_ * units_;
    for (std::size_t r = 0; r < rows; ++r)
      std::copy(bias, bias + units_, out.data.data() + r * units_);
    kernels::gemm_acc(rows, units_, in_, in.data.data(), in_, kernel, units_,
                      out.data.data(), units_);
    activate(act_, out.data.data(), out.data.size());
  }

  void backward(const double* p, const Activations& in, const Activations& out,
                const Activations& dout, double* grad, Activations* din) override {
    const std::size_t rows = in.steps * in.batch;
    dz_.resize(rows * units_);
    activation_grad(act_, out.data.data(), dout.data.data(), dz_.data(), dz_.size());
    kernels::gemm_tn_acc(rows, units_, in_, in.data.data(), in_, dz_.data(), units_,
                         grad, units_);
    kernels::col_sum_acc(rows, units_, dz_.data(), units_, grad + in_ * units_);
    if (din != nullptr) {
      kt_.resize(units_ * in_);
      kernels::transpose(in_, units_, p, units_, kt_.data(), in_);
      din->resize(in.steps, in.batch, in_);
      din->zero();
      kernels::gemm_acc(rows, in_, units_, dz_.data(), units_, kt_.data(), in_,
                        din->data.data(), in_);
    }
  }

 private:
  std::size_t in_, units_;
  Activation act_;
  std::vector<double> dz_, kt_;
};

class Conv1DLayer final : public LayerImpl {
 public:
  Conv1DLayer(std::size_t channels, const Conv1D& c)
      : channels_(channels), filters_(c.filters), kernel_(c.kernel), stride_(c.stride) {}

  void forward(const double* p, const Activations& in, Activations& out) override {
    if (in.steps < kernel_)
      throw Error(ErrorCode::KernelLargerThanInput, "conv kernel longer than input");
    const std::size_t t_out = (in.steps - kernel_) / stride_ + 1;
    out.resize(t_out, in.batch, filters_);
    const double* bias = p + kernel_ * channels_ * filters_;
    for (std::size_t t = 0; t < t_out; ++t) {
      double* o = out.step(t);
      for (std::size_t b = 0; b < in.batch; ++b)
        std::copy(bias, bias + filters_, o + b * filters_);
      for (std::size_t j = 0; j < kernel_; ++j)
        kernels::gemm_acc(in.batch, filters_, channels_, in.step(t * stride_ + j),
                          channels_, p + j * channels_ * filters_, filters_, o, filters_);
    }
  }

  void backward(const double* p, const Activations& in, const Activations& out,
                const Activations& dout, double* grad, Activations* din) override {
    const std::size_t tap = channels_ * filters_;
    double* g_bias = grad + kernel_ * tap;
    if (din != nullptr) {
      kt_.resize(kernel_ * tap);
      for (std::size_t j = 0; j < kernel_; ++j)
        kernels::transpose(channels_, filters_, p + j * tap, filters_,
                           kt_.data() + j * tap, channels_);
      din->resize(in.steps, in.batch, channels_);
      din->zero();
    }
    for (std::size_t t = 0; t < out.steps; ++t) {
      const double* d = dout.step(t);
      for (std::size_t j = 0; j < kernel_; ++j) {
        const std::size_t ti = t * stride_ + j;
        kernels::gemm_tn_acc(in.batch, filters_, channels_, in.step(ti), channels_, d,
                             filters_, grad + j * tap, filters_);
        if (din != nullptr)
          kernels::gemm_acc(in.batch, channels_, filters_, d, filters_,
                            kt_.data() + j * tap, channels_, din->step(ti), channels_);
      }
      kernels::col_sum_acc(in.batch, filters_, d, filters_, g_bias);
    }
  }

 private:
  std::size_t channels_, filters_, kernel_, stride_;
  std::vector<double> kt_;
};

class MaxPoolLayer final : public LayerImpl {
 public:
  explicit MaxPoolLayer(std::size_t size) : size_(size) {}

  void forward(const double*, const Activations& in, Activations& out) override {
    maxpool_forward(in, size_, out, argmax_);
  }

  void backward(const double*, const Activations& in, const Activations& out,
                const Activations& dout, double*, Activations* din) override {
    if (din == nullptr) return;
    const std::size_t row = in.batch * in.channels;
    din->resize(in.steps, in.batch, in.channels);
    din->zero();
    for (std::size_t t = 0; t < out.steps; ++t)
      for (std::size_t k = 0; k < row; ++k)
        din->step(argmax_[t * row + k])[k] += dout.step(t)[k];
  }

 private:
  std::size_t size_;
  std::vector<std::size_t> argmax_;
};

class FlattenLayer final : public LayerImpl {
 public:
  void forward(const double*, const Activations& in, Activations& out) override {
    const std::size_t width = in.steps * in.channels;
    out.resize(1, in.batch, width);
    for (std::size_t t = 0; t < in.steps; ++t)
      for (std::size_t b = 0; b < in.batch; ++b)
        std::copy(in.step(t) + b * in.channels, in.step(t) + (b + 1) * in.channels,
                  out.data.data() + b * width + t * in.channels);
  }

  void backward(const double*, const Activations& in, const Activations&,
                const Activations& dout, double*, Activations* din) override {
    if (din == nullptr) return;
    const std::size_t width = in.steps * in.channels;
    din->resize(in.steps, in.batch, in.channels);
    for (std::size_t t = 0; t < in.steps; ++t)
      for (std::size_t b = 0; b < in.batch; ++b) {
        const double* src = dout.data.data() + b * width + t * in.channels;
        std::copy(src, src + in.channels, din->step(t) + b * in.channels);
      }
  }
};

LstmWeights weights_at(const double* p, std::size_t inputs, std::size_t units) {
  const std::size_t g4 = 4 * units;
  return {p, p + inputs * g4, p + (inputs + units) * g4};
}

class LstmLayer final : public LayerImpl {
 public:
  LstmLayer(std::size_t inputs, const Lstm& spec)
      : core_(inputs, spec.units, false), return_sequences_(spec.return_sequences) {}

  void forward(const double* p, const Activations& in, Activations& out) override {
    const std::size_t u = core_.units();
    core_.forward(weights_at(p, core_.inputs(), u), in);
    const auto& h = core_.hidden();
    if (return_sequences_) {
      out.resize(in.steps, in.batch, u);
      std::copy(h.begin(), h.end(), out.data.begin());
    } else {
      out.resize(1, in.batch, u);
      const auto last = h.begin() + static_cast<std::ptrdiff_t>((in.steps - 1) * in.batch * u);
      std::copy(last, last + static_cast<std::ptrdiff_t>(in.batch * u), out.data.begin());
    }
  }

  void backward(const double* p, const Activations& in, const Activations&,
                const Activations& dout, double* grad, Activations* din) override {
    const std::size_t u = core_.units();
    const std::size_t hs = in.batch * u;
    dh_.assign(in.steps * hs, 0.0);
    if (return_sequences_) {
      std::copy(dout.data.begin(), dout.data.end(), dh_.begin());
    } else {
      std::copy(dout.data.begin(), dout.data.end(),
                dh_.begin() + static_cast<std::ptrdiff_t>((in.steps - 1) * hs));
    }
    if (din != nullptr) {
      din->resize(in.steps, in.batch, core_.inputs());
      din->zero();
    }
    core_.backward(weights_at(p, core_.inputs(), u), in, dh_.data(), grad, din);
  }

 private:
  LstmCore core_;
  bool return_sequences_;
  std::vector<double> dh_;
};

class BiLstmLayer final : public LayerImpl {
 public:
  BiLstmLayer(std::size_t inputs, const BiLstm& spec)
      : fwd_(inputs, spec.units, false),
        rev_(inputs, spec.units, true),
        return_sequences_(spec.return_sequences) {}

  void forward(const double* p, const Activations& in, Activations& out) override {
    const std::size_t u = fwd_.units();
    const std::size_t d = fwd_.inputs();
    fwd_.forward(weights_at(p, d, u), in);
    rev_.forward(weights_at(p + fwd_.param_size(), d, u), in);
    const auto& hf = fwd_.hidden();
    const auto& hr = rev_.hidden();
    const std::size_t B = in.batch;
    auto emit = [&](std::size_t t_out, std::size_t t_f, std::size_t t_r) {
      for (std::size_t b = 0; b < B; ++b) {
        double* o = out.step(t_out) + b * 2 * u;
        const double* f = hf.data() + (t_f * B + b) * u;
        const double* r = hr.data() + (t_r * B + b) * u;
        std::copy(f, f + u, o);
        std::copy(r, r + u, o + u);
      }
    };
    if (return_sequences_) {
      out.resize(in.steps, B, 2 * u);
      for (std::size_t t = 0; t < in.steps; ++t) emit(t, t, t);
    } else {
      out.resize(1, B, 2 * u);
      emit(0, in.steps - 1, 0);
    }
  }

  void backward(const double* p, const Activations& in, const Activations&,
                const Activations& dout, double* grad, Activations* din) override {
    const std::size_t u = fwd_.units();
    const std::size_t d = fwd_.inputs();
    const std::size_t B = in.batch;
    const std::size_t hs = B * u;
    dh_f_.assign(in.steps * hs, 0.0);
    dh_r_.assign(in.steps * hs, 0.0);
    auto take = [&](std::size_t t_out, std::size_t t_f, std::size_t t_r) {
      for (std::size_t b = 0; b < B; ++b) {
        const double* g = dout.step(t_out) + b * 2 * u;
        std::copy(g, g + u, dh_f_.data() + (t_f * B + b) * u);
        std::copy(g + u, g + 2 * u, dh_r_.data() + (t_r * B + b) * u);
      }
    };
    if (return_sequences_) {
      for (std::size_t t = 0; t < in.steps; ++t) take(t, t, t);
    } else {
      take(0, in.steps - 1, 0);
    }
    if (din != nullptr) {
      din->resize(in.steps, B, d);
      din->zero();
    }
    fwd_.backward(weights_at(p, d, u), in, dh_f_.data(), grad, din);
    rev_.backward(weights_at(p + fwd_.param_size(), d, u), in, dh_r_.data(),
                  grad + fwd_.param_size(), din);
  }

 private:
  LstmCore fwd_;
  LstmCore rev_;
  bool return_sequences_;
  std::vector<double> dh_f_, dh_r_;
};

}  // namespace

std::unique_ptr<LayerImpl> make_layer(const LayerSpec& spec, const Shape& in) {
  return std::visit(
      [&](const auto& l) -> std::unique_ptr<LayerImpl> {
        using T = std::decay_t<decltype(l)>;
        if constexpr (std::is_same_v<T, Dense>) {
          return std::make_unique<DenseLayer>(in.channels, l.units, l.activation);
        } else if constexpr (std::is_same_v<T, TimeDistributedDense>) {
          return std::make_unique<DenseLayer>(in.channels, l.units, l.activation);
        } else if constexpr (std::is_same_v<T, Conv1D>) {
          return std::make_unique<Conv1DLayer>(in.channels, l);
        } else if constexpr (std::is_same_v<T, MaxPool1D>) {
          return std::make_unique<MaxPoolLayer>(l.size);
        } else if constexpr (std::is_same_v<T, Flatten>) {
          return std::make_unique<FlattenLayer>();
        } else if constexpr (std::is_same_v<T, Lstm>) {
          return std::make_unique<LstmLayer>(in.channels, l);
        } else {
          return std::make_unique<BiLstmLayer>(in.channels, l);
        }
      },
      spec);
}

}  // namespace stlf::nn
