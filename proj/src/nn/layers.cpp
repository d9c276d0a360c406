#include "stlf/nn/layers.hpp"

#include <string>

#include "engine.hpp"
#include "stlf/error.hpp"

namespace stlf::nn {
namespace {

void require(bool ok, const char* what) {
  if (!ok) throw Error(ErrorCode::ShapeMismatch, what);
}

void check_matrix(const Tensor& t, std::size_t rows, std::size_t cols, const char* what) {
  require(t.rank() == 2 && t.dim(0) == rows && t.dim(1) == cols, what);
}

void check_lstm(const LstmParams& p) {
  const std::size_t u = p.units();
  require(u > 0 && p.w_ix.rank() == 2, "LSTM parameters are empty");
  const std::size_t d = p.inputs();
  for (const Tensor* w : {&p.w_ix, &p.w_fx, &p.w_cx, &p.w_ox})
    check_matrix(*w, u, d, "LSTM input weights must be units x inputs");
  for (const Tensor* w : {&p.w_ih, &p.w_fh, &p.w_ch, &p.w_oh})
    check_matrix(*w, u, u, "LSTM recurrent weights must be units x units");
  for (const Tensor* b : {&p.b_i, &p.b_f, &p.b_c, &p.b_o})
    require(b->size() == u, "LSTM biases must have length units");
}

// Engine layout: kernel_x (d x 4u), kernel_h (u x 4u), bias (4u), gate
// column blocks in the order i, f, c~, o.
std::vector<double> pack_lstm(const LstmParams& p) {
  check_lstm(p);
  const std::size_t u = p.units(), d = p.inputs(), g4 = 4 * u;
  std::vector<double> flat(4 * u * (d + u + 1), 0.0);
  const Tensor* wx[] = {&p.w_ix, &p.w_fx, &p.w_cx, &p.w_ox};
  const Tensor* wh[] = {&p.w_ih, &p.w_fh, &p.w_ch, &p.w_oh};
  const Tensor* bs[] = {&p.b_i, &p.b_f, &p.b_c, &p.b_o};
  double* kx = flat.data();
  double* kh = kx + d * g4;
  double* bias = kh + u * g4;
  for (std::size_t g = 0; g < 4; ++g)
    for (std::size_t j = 0; j < u; ++j) {
      for (std::size_t k = 0; k < d; ++k) kx[k * g4 + g * u + j] = (*wx[g])(j, k);
      for (std::size_t k = 0; k < u; ++k) kh[k * g4 + g * u + j] = (*wh[g])(j, k);
      bias[g * u + j] = (*bs[g])[j];
    }
  return flat;
}

LstmWeights view(const std::vector<double>& flat, std::size_t d, std::size_t u) {
  const double* p = flat.data();
  return {p, p + d * 4 * u, p + (d + u) * 4 * u};
}

Activations sequence_of(const Tensor& seq, std::size_t expected_channels) {
  require(seq.rank() == 2, "sequence must be a T x channels tensor");
  require(seq.dim(1) == expected_channels, "sequence channels do not match the parameters");
  Activations a;
  a.resize(seq.dim(0), 1, seq.dim(1));
  std::copy(seq.values().begin(), seq.values().end(), a.data.begin());
  return a;
}

}  // namespace

std::string_view activation_name(Activation a) {
  switch (a) {
    case Activation::relu: return "relu";
    case Activation::linear: return "linear";
    case Activation::sigmoid: return "sigmoid";
    case Activation::tanh: return "tanh";
  }
  return "linear";
}

Activation parse_activation(std::string_view name) {
  for (Activation a : {Activation::relu, Activation::linear, Activation::sigmoid, Activation::tanh})
    if (activation_name(a) == name) return a;
  throw Error(ErrorCode::InvalidConfig, "unknown activation '" + std::string(name) + "'");
}

LstmParams LstmParams::zeros(std::size_t units, std::size_t inputs) {
  LstmParams p;
  for (Tensor* w : {&p.w_ix, &p.w_fx, &p.w_cx, &p.w_ox}) *w = Tensor({units, inputs});
  for (Tensor* w : {&p.w_ih, &p.w_fh, &p.w_ch, &p.w_oh}) *w = Tensor({units, units});
  for (Tensor* b : {&p.b_i, &p.b_f, &p.b_c, &p.b_o}) *b = Tensor({units});
  return p;
}

BiLstmParams BiLstmParams::zeros(std::size_t units, std::size_t inputs, std::size_t out) {
  return {LstmParams::zeros(units, inputs), LstmParams::zeros(units, inputs),
          Tensor({out, units}), Tensor({out, units}), Tensor({out})};
}

LstmState lstm_cell_step(std::span<const double> x, const LstmState& prev,
                         const LstmParams& p) {
  const auto flat = pack_lstm(p);
  const std::size_t u = p.units(), d = p.inputs();
  require(x.size() == d, "input vector length does not match LSTM inputs");
  require(prev.h.size() == u && prev.c.size() == u, "state length does not match LSTM units");
  std::vector<double> gates(4 * u), tanh_c(u);
  LstmState next = LstmState::zeros(u);
  lstm_step(view(flat, d, u), 1, d, u, x.data(), prev.h.data(), prev.c.data(), gates.data(),
            next.c.data(), tanh_c.data(), next.h.data());
  return next;
}

Tensor lstm_layer_forward(const Tensor& seq, const LstmParams& p, bool return_sequences) {
  const auto flat = pack_lstm(p);
  const std::size_t u = p.units(), d = p.inputs();
  const Activations in = sequence_of(seq, d);
  LstmCore core(d, u, false);
  core.forward(view(flat, d, u), in);
  const auto& h = core.hidden();
  if (return_sequences) return Tensor({in.steps, u}, h);
  return Tensor({u}, {h.end() - static_cast<std::ptrdiff_t>(u), h.end()});
}

Tensor bilstm_layer_forward(const Tensor& seq, const BiLstmParams& p, bool return_sequences) {
  const auto flat_f = pack_lstm(p.forward);
  const auto flat_r = pack_lstm(p.reverse);
  const std::size_t u = p.forward.units(), d = p.forward.inputs();
  require(p.reverse.units() == u && p.reverse.inputs() == d,
          "forward and reverse LSTM shapes must match");
  require(p.b_y.size() > 0, "BiLSTM output bias is empty");
  const std::size_t out = p.b_y.size();
  check_matrix(p.w_y_fwd, out, u, "w_y_fwd must be out x units");
  check_matrix(p.w_y_rev, out, u, "w_y_rev must be out x units");

  const Activations in = sequence_of(seq, d);
  LstmCore fwd(d, u, false), rev(d, u, true);
  fwd.forward(view(flat_f, d, u), in);
  rev.forward(view(flat_r, d, u), in);

  auto combine = [&](std::size_t t_f, std::size_t t_r, double* y) {
    const double* hf = fwd.hidden().data() + t_f * u;
    const double* hr = rev.hidden().data() + t_r * u;
    for (std::size_t o = 0; o < out; ++o) {
      double acc = p.b_y[o];
      for (std::size_t j = 0; j < u; ++j) acc += p.w_y_fwd(o, j) * hf[j];
      for (std::size_t j = 0; j < u; ++j) acc += p.w_y_rev(o, j) * hr[j];
      y[o] = acc;
    }
  };
  if (!return_sequences) {
    Tensor y({out});
    combine(in.steps - 1, 0, y.values().data());
    return y;
  }
  Tensor y({in.steps, out});
  for (std::size_t t = 0; t < in.steps; ++t) combine(t, t, y.values().data() + t * out);
  return y;
}

Tensor conv1d_forward(const Tensor& seq, const Conv1DParams& p, std::size_t stride) {
  require(p.weights.rank() == 3, "conv weights must be filters x kernel x channels");
  require(stride > 0, "stride must be positive");
  const std::size_t f = p.weights.dim(0), k = p.weights.dim(1), c = p.weights.dim(2);
  require(p.bias.size() == f, "conv bias must have one entry per filter");
  const Activations in = sequence_of(seq, c);
  if (in.steps < k) throw Error(ErrorCode::KernelLargerThanInput, "conv kernel longer than input");

  std::vector<double> flat(k * c * f + f);
  for (std::size_t fi = 0; fi < f; ++fi) {
    for (std::size_t j = 0; j < k; ++j)
      for (std::size_t ch = 0; ch < c; ++ch)
        flat[(j * c + ch) * f + fi] = p.weights.values()[(fi * k + j) * c + ch];
    flat[k * c * f + fi] = p.bias[fi];
  }
  auto layer = make_layer(Conv1D{f, k, stride}, Shape{in.steps, c, true});
  Activations out;
  layer->forward(flat.data(), in, out);
  return Tensor({out.steps, f}, std::move(out.data));
}

MaxPoolResult maxpool1d_forward(const Tensor& seq, std::size_t size) {
  require(seq.rank() == 2, "sequence must be a T x channels tensor");
  require(size > 0, "pool size must be positive");
  const Activations in = sequence_of(seq, seq.dim(1));
  Activations out;
  MaxPoolResult r;
  maxpool_forward(in, size, out, r.argmax);
  r.output = Tensor({out.steps, out.channels}, std::move(out.data));
  return r;
}

std::vector<double> dense_forward(std::span<const double> x, const Tensor& w,
                                  std::span<const double> b, Activation act) {
  require(w.rank() == 2, "dense weights must be out x in");
  const std::size_t out = w.dim(0), in = w.dim(1);
  require(x.size() == in && b.size() == out, "dense input/bias length mismatch");
  std::vector<double> flat(in * out + out);
  for (std::size_t o = 0; o < out; ++o) {
    for (std::size_t i = 0; i < in; ++i) flat[i * out + o] = w(o, i);
    flat[in * out + o] = b[o];
  }
  Activations a;
  a.resize(1, 1, in);
  std::copy(x.begin(), x.end(), a.data.begin());
  auto layer = make_layer(Dense{out, act}, Shape{1, in, false});
  Activations y;
  layer->forward(flat.data(), a, y);
  return y.data;
}

}  // namespace stlf::nn
