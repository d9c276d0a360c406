#pragma once

// Single-sample forward functions for each layer type. They run on the same
// engine the batched network uses; parameters are given in conventional
// math orientation (weight matrices are out x in).

#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

#include "stlf/tensor.hpp"

namespace stlf::nn {

enum class Activation { relu, linear, sigmoid, tanh };

std::string_view activation_name(Activation a);
Activation parse_activation(std::string_view name);

// Gate weights of one LSTM direction. All input weights are units x inputs,
// recurrent weights units x units, biases length units.
struct LstmParams {
  Tensor w_ix, w_fx, w_cx, w_ox;
  Tensor w_ih, w_fh, w_ch, w_oh;
  Tensor b_i, b_f, b_c, b_o;

  static LstmParams zeros(std::size_t units, std::size_t inputs);
  std::size_t units() const { return b_i.size(); }
  std::size_t inputs() const { return w_ix.rank() == 2 ? w_ix.dim(1) : 0; }
};

struct LstmState {
  std::vector<double> h;
  std::vector<double> c;

  static LstmState zeros(std::size_t units) {
    return {std::vector<double>(units, 0.0), std::vector<double>(units, 0.0)};
  }
};

// Forward and reverse directions plus the linear combination
// y_t = W_fwd h_fwd(t) + W_rev h_rev(t) + b_y.
struct BiLstmParams {
  LstmParams forward;
  LstmParams reverse;
  Tensor w_y_fwd;  // out x units
  Tensor w_y_rev;  // out x units
  Tensor b_y;      // out

  static BiLstmParams zeros(std::size_t units, std::size_t inputs, std::size_t out);
};

struct Conv1DParams {
  Tensor weights;  // filters x kernel x channels
  Tensor bias;     // filters
};

struct MaxPoolResult {
  Tensor output;                 // floor(T / size) x channels
  std::vector<std::size_t> argmax;  // input time index per output element
};

LstmState lstm_cell_step(std::span<const double> x, const LstmState& prev,
                         const LstmParams& p);

// seq is T x inputs. Returns T x units, or a length-units vector when
// return_sequences is false.
Tensor lstm_layer_forward(const Tensor& seq, const LstmParams& p,
                          bool return_sequences);

// Returns T x out, or a length-out vector combining the forward state at
// T-1 with the reverse state at 0 when return_sequences is false.
Tensor bilstm_layer_forward(const Tensor& seq, const BiLstmParams& p,
                            bool return_sequences);

// Valid (unpadded) convolution; returns T' x filters with
// T' = floor((T - kernel) / stride) + 1.
Tensor conv1d_forward(const Tensor& seq, const Conv1DParams& p, std::size_t stride);

// Non-overlapping windows; a trailing remainder shorter than `size` is
// dropped and ties pick the earliest index.
MaxPoolResult maxpool1d_forward(const Tensor& seq, std::size_t size);

std::vector<double> dense_forward(std::span<const double> x, const Tensor& w,
                                  std::span<const double> b, Activation act);

}  // namespace stlf::nn
