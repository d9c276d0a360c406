#pragma once

// Batched layer implementations. Activations are time-major: element
// (t, b, c) lives at (t * batch + b) * channels + c, so each time step is a
// contiguous batch x channels matrix.

#include <cstddef>
#include <memory>
#include <vector>

#include "stlf/nn/model.hpp"

namespace stlf::nn {

struct Activations {
  std::size_t steps = 0;
  std::size_t batch = 0;
  std::size_t channels = 0;
  std::vector<double> data;

  void resize(std::size_t t, std::size_t b, std::size_t c) {
    steps = t;
    batch = b;
    channels = c;
    data.resize(t * b * c);
  }
  void zero() { std::fill(data.begin(), data.end(), 0.0); }
  double* step(std::size_t t) { return data.data() + t * batch * channels; }
  const double* step(std::size_t t) const { return data.data() + t * batch * channels; }
};

class LayerImpl {
 public:
  virtual ~LayerImpl() = default;
  virtual void forward(const double* params, const Activations& in, Activations& out) = 0;
  // grad points at this layer's block of the flat gradient and is
  // accumulated into. din, when non-null, is overwritten.
  virtual void backward(const double* params, const Activations& in,
                        const Activations& out, const Activations& dout,
                        double* grad, Activations* din) = 0;
};

std::unique_ptr<LayerImpl> make_layer(const LayerSpec& spec, const Shape& in);

// Applies the activation in place.
void activate(Activation act, double* x, std::size_t n);
// dz = dy * act'(y), expressed through the activation output y.
void activation_grad(Activation act, const double* y, const double* dy, double* dz,
                     std::size_t n);

// Non-overlapping max pooling; argmax receives the input time index chosen
// for each output element (ties go to the earliest index).
void maxpool_forward(const Activations& in, std::size_t size, Activations& out,
                     std::vector<std::size_t>& argmax);

// Views into one LSTM direction's parameter block.
struct LstmWeights {
  const double* kernel_x;  // inputs x 4u
  const double* kernel_h;  // u x 4u
  const double* bias;      // 4u
};

// One time step for a batch: z = bias + x kernel_x + h_prev kernel_h, then
// gates (i, f, c~, o) and the new cell/hidden states. h_prev/c_prev may be
// null for a zero initial state. gates receives batch x 4u activated values.
void lstm_step(const LstmWeights& w, std::size_t batch, std::size_t inputs,
               std::size_t units, const double* x, const double* h_prev,
               const double* c_prev, double* gates, double* c, double* tanh_c,
               double* h);

// One recurrent direction over a full sequence, caching everything the
// backward pass needs. Hidden outputs are aligned to input positions for
// both directions.
class LstmCore {
 public:
  LstmCore(std::size_t inputs, std::size_t units, bool reverse)
      : inputs_(inputs), units_(units), reverse_(reverse) {}

  void forward(const LstmWeights& w, const Activations& in);
  // dh: steps x batch x units upstream gradient on the hidden outputs.
  // Accumulates parameter gradients into grad (kernel_x, kernel_h, bias
  // blocks back to back) and input gradients into din.
  void backward(const LstmWeights& w, const Activations& in, const double* dh,
                double* grad, Activations* din);

  const std::vector<double>& hidden() const { return hidden_; }
  const std::vector<double>& cells() const { return cells_; }
  std::size_t units() const { return units_; }
  std::size_t inputs() const { return inputs_; }
  std::size_t param_size() const { return 4 * units_ * (inputs_ + units_ + 1); }

 private:
  std::size_t inputs_;
  std::size_t units_;
  bool reverse_;
  std::size_t steps_ = 0;
  std::size_t batch_ = 0;
  std::vector<double> gates_;
  std::vector<double> cells_;
  std::vector<double> tanh_c_;
  std::vector<double> hidden_;
  // backward scratch
  std::vector<double> kx_t_, kh_t_, dz_, dh_next_, dc_next_;
};

}  // namespace stlf::nn
