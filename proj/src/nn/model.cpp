#include "stlf/nn/model.hpp"

#include <cmath>
#include <random>
#include <string>

#include "engine.hpp"
#include "stlf/error.hpp"

namespace stlf::nn {
namespace {

std::string layer_label(const LayerSpec& l, std::size_t index) {
  return std::string(layer_type_name(l)) + "_" + std::to_string(index);
}

void require_positive(std::size_t v, const char* what, std::size_t index) {
  if (v == 0)
    throw Error(ErrorCode::ShapeMismatch,
                "layer " + std::to_string(index) + ": " + what + " must be positive");
}

}  // namespace

std::string_view layer_type_name(const LayerSpec& layer) {
  return std::visit(
      [](const auto& l) -> std::string_view {
        using T = std::decay_t<decltype(l)>;
        if constexpr (std::is_same_v<T, Dense>) return "dense";
        else if constexpr (std::is_same_v<T, Conv1D>) return "conv1d";
        else if constexpr (std::is_same_v<T, MaxPool1D>) return "maxpool1d";
        else if constexpr (std::is_same_v<T, Flatten>) return "flatten";
        else if constexpr (std::is_same_v<T, Lstm>) return "lstm";
        else if constexpr (std::is_same_v<T, BiLstm>) return "bilstm";
        else return "time_distributed_dense";
      },
      layer);
}

std::vector<Shape> infer_shapes(const ModelSpec& spec) {
  if (spec.timesteps == 0 || spec.channels == 0)
    throw Error(ErrorCode::ShapeMismatch, "input shape must be positive");
  std::vector<Shape> shapes{{spec.timesteps, spec.channels, true}};
  for (std::size_t i = 0; i < spec.layers.size(); ++i) {
    const Shape in = shapes.back();
    const std::string where = "layer " + std::to_string(i) + " (" +
                              std::string(layer_type_name(spec.layers[i])) + ")";
    auto need_sequence = [&] {
      if (!in.sequence)
        throw Error(ErrorCode::ShapeMismatch, where + " needs a sequence input");
    };
    Shape out = std::visit(
        [&](const auto& l) -> Shape {
          using T = std::decay_t<decltype(l)>;
          if constexpr (std::is_same_v<T, Dense>) {
            require_positive(l.units, "units", i);
            if (in.sequence)
              throw Error(ErrorCode::ShapeMismatch,
                          where + " needs a flat input (insert Flatten)");
            return {1, l.units, false};
          } else if constexpr (std::is_same_v<T, TimeDistributedDense>) {
            require_positive(l.units, "units", i);
            need_sequence();
            return {in.steps, l.units, true};
          } else if constexpr (std::is_same_v<T, Conv1D>) {
            require_positive(l.filters, "filters", i);
            require_positive(l.kernel, "kernel", i);
            require_positive(l.stride, "stride", i);
            need_sequence();
            if (in.steps < l.kernel)
              throw Error(ErrorCode::KernelLargerThanInput, where + ": kernel exceeds input length");
            return {(in.steps - l.kernel) / l.stride + 1, l.filters, true};
          } else if constexpr (std::is_same_v<T, MaxPool1D>) {
            require_positive(l.size, "size", i);
            need_sequence();
            if (in.steps < l.size)
              throw Error(ErrorCode::WindowLargerThanInput, where + ": window exceeds input length");
            return {in.steps / l.size, in.channels, true};
          } else if constexpr (std::is_same_v<T, Flatten>) {
            return {1, in.steps * in.channels, false};
          } else if constexpr (std::is_same_v<T, Lstm>) {
            require_positive(l.units, "units", i);
            need_sequence();
            return l.return_sequences ? Shape{in.steps, l.units, true}
                                      : Shape{1, l.units, false};
          } else {
            require_positive(l.units, "units", i);
            need_sequence();
            return l.return_sequences ? Shape{in.steps, 2 * l.units, true}
                                      : Shape{1, 2 * l.units, false};
          }
        },
        spec.layers[i]);
    shapes.push_back(out);
  }
  const Shape& last = shapes.back();
  const bool flat_head = !last.sequence && last.channels == kHorizon;
  const bool seq_head = last.sequence && last.steps == kHorizon && last.channels == 1;
  if (spec.layers.empty() || !(flat_head || seq_head))
    throw Error(ErrorCode::ShapeMismatch,
                "model must end in Dense(24) or a 24-step TimeDistributedDense(1) head");
  return shapes;
}

std::string_view model_kind_name(ModelKind kind) {
  switch (kind) {
    case ModelKind::naive: return "naive";
    case ModelKind::lstm: return "lstm";
    case ModelKind::bilstm: return "bilstm";
    case ModelKind::cnn_lstm: return "cnn-lstm";
    case ModelKind::cnn_bilstm: return "cnn-bilstm";
  }
  return "unknown";
}

ModelKind parse_model_kind(std::string_view name) {
  for (ModelKind k : {ModelKind::naive, ModelKind::lstm, ModelKind::bilstm,
                      ModelKind::cnn_lstm, ModelKind::cnn_bilstm})
    if (model_kind_name(k) == name) return k;
  throw Error(ErrorCode::InvalidConfig, "unknown model '" + std::string(name) +
                                            "' (naive, lstm, bilstm, cnn-lstm, cnn-bilstm)");
}

std::size_t default_units(ModelKind kind) {
  switch (kind) {
    case ModelKind::lstm:
    case ModelKind::bilstm:
      return 100;
    case ModelKind::cnn_lstm:
    case ModelKind::cnn_bilstm:
      return 200;
    case ModelKind::naive:
      return 0;
  }
  return 0;
}

ModelSpec reference_spec(ModelKind kind, std::size_t units) {
  if (units == 0) units = default_units(kind);
  ModelSpec s;
  switch (kind) {
    case ModelKind::lstm:
      s.layers = {Lstm{units, true}, TimeDistributedDense{100, Activation::relu},
                  TimeDistributedDense{1, Activation::linear}};
      break;
    case ModelKind::bilstm:
      s.layers = {BiLstm{units, true}, TimeDistributedDense{100, Activation::relu},
                  TimeDistributedDense{1, Activation::linear}};
      break;
    case ModelKind::cnn_lstm:
      s.layers = {Conv1D{64, 3, 1}, MaxPool1D{2}, Lstm{units, false},
                  Dense{100, Activation::relu}, Dense{kHorizon, Activation::linear}};
      break;
    case ModelKind::cnn_bilstm:
      s.layers = {Conv1D{64, 3, 1}, MaxPool1D{2}, BiLstm{units, false},
                  Dense{100, Activation::relu}, Dense{kHorizon, Activation::linear}};
      break;
    case ModelKind::naive:
      throw Error(ErrorCode::InvalidConfig, "the naive baseline has no network spec");
  }
  return s;
}

std::vector<ParamEntry> param_layout(const ModelSpec& spec) {
  const auto shapes = infer_shapes(spec);
  std::vector<ParamEntry> out;
  std::size_t offset = 0;
  for (std::size_t i = 0; i < spec.layers.size(); ++i) {
    const std::string label = layer_label(spec.layers[i], i);
    const Shape in = shapes[i];
    auto add = [&](std::string name, std::size_t rows, std::size_t cols, bool bias,
                   std::size_t fan_in, std::size_t fan_out) {
      out.push_back({i, label, std::move(name), offset, rows, cols, bias, fan_in, fan_out});
      offset += rows * cols;
    };
    auto add_lstm = [&](const std::string& prefix, std::size_t u) {
      add(prefix + "kernel_x", in.channels, 4 * u, false, in.channels, 4 * u);
      add(prefix + "kernel_h", u, 4 * u, false, u, 4 * u);
      add(prefix + "bias", 1, 4 * u, true, 0, 0);
    };
    std::visit(
        [&](const auto& l) {
          using T = std::decay_t<decltype(l)>;
          if constexpr (std::is_same_v<T, Dense> || std::is_same_v<T, TimeDistributedDense>) {
            add("kernel", in.channels, l.units, false, in.channels, l.units);
            add("bias", 1, l.units, true, 0, 0);
          } else if constexpr (std::is_same_v<T, Conv1D>) {
            add("kernel", l.kernel * in.channels, l.filters, false, l.kernel * in.channels,
                l.kernel * l.filters);
            add("bias", 1, l.filters, true, 0, 0);
          } else if constexpr (std::is_same_v<T, Lstm>) {
            add_lstm("", l.units);
          } else if constexpr (std::is_same_v<T, BiLstm>) {
            add_lstm("fwd_", l.units);
            add_lstm("rev_", l.units);
          }
        },
        spec.layers[i]);
  }
  return out;
}

std::size_t param_count(const ModelSpec& spec) {
  std::size_t n = 0;
  for (const auto& e : param_layout(spec)) n += e.size();
  return n;
}

const ParamEntry& ParamStore::entry(std::string_view layer_name, std::string_view name) const {
  for (const auto& e : layout)
    if (e.layer_name == layer_name && e.name == name) return e;
  throw Error(ErrorCode::ShapeMismatch,
              "no parameter " + std::string(layer_name) + "/" + std::string(name));
}

const ParamEntry& ParamStore::owner(std::size_t i) const {
  for (const auto& e : layout)
    if (i >= e.offset && i < e.offset + e.size()) return e;
  throw Error(ErrorCode::ShapeMismatch, "parameter index out of range");
}

void ParamStore::zero_grads() { std::fill(grads.begin(), grads.end(), 0.0); }

ParamStore make_param_store(const ModelSpec& spec) {
  ParamStore s;
  s.layout = param_layout(spec);
  const std::size_t n = s.layout.empty() ? 0 : s.layout.back().offset + s.layout.back().size();
  s.values.assign(n, 0.0);
  s.grads.assign(n, 0.0);
  return s;
}

ParamStore init_params(const ModelSpec& spec, std::uint64_t seed) {
  ParamStore s = make_param_store(spec);
  std::mt19937_64 rng(seed);
  for (const auto& e : s.layout) {
    auto block = s.slice(e);
    if (e.is_bias) {
      const auto& layer = spec.layers[e.layer];
      const bool recurrent =
          std::holds_alternative<Lstm>(layer) || std::holds_alternative<BiLstm>(layer);
      if (recurrent) {
        const std::size_t u = e.cols / 4;
        std::fill(block.begin() + static_cast<std::ptrdiff_t>(u),
                  block.begin() + static_cast<std::ptrdiff_t>(2 * u), 1.0);
      }
      continue;
    }
    const double limit = std::sqrt(6.0 / static_cast<double>(e.fan_in + e.fan_out));
    std::uniform_real_distribution<double> dist(-limit, limit);
    for (auto& v : block) v = dist(rng);
  }
  return s;
}

Network::Network(ModelSpec spec) : spec_(std::move(spec)) {
  shapes_ = infer_shapes(spec_);
  const auto layout = param_layout(spec_);
  offsets_.assign(spec_.layers.size(), 0);
  std::size_t next = 0;
  for (std::size_t i = 0; i < spec_.layers.size(); ++i) {
    offsets_[i] = next;
    for (const auto& e : layout)
      if (e.layer == i) next = e.offset + e.size();
  }
  param_count_ = next;
  for (std::size_t i = 0; i < spec_.layers.size(); ++i)
    layers_.push_back(make_layer(spec_.layers[i], shapes_[i]));
  acts_.resize(spec_.layers.size() + 1);
  grads_.resize(spec_.layers.size() + 1);
}

Network::~Network() = default;
Network::Network(Network&&) noexcept = default;
Network& Network::operator=(Network&&) noexcept = default;

std::span<const double> Network::forward(std::span<const double> params,
                                         std::span<const double> inputs,
                                         std::size_t batch) {
  if (params.size() != param_count_)
    throw Error(ErrorCode::ShapeMismatch,
                "parameter vector has " + std::to_string(params.size()) +
                    " entries, spec needs " + std::to_string(param_count_));
  const std::size_t T = spec_.timesteps, C = spec_.channels;
  if (batch == 0 || inputs.size() != batch * T * C)
    throw Error(ErrorCode::ShapeMismatch, "input batch has the wrong size");
  has_cache_ = false;
  Activations& a0 = acts_[0];
  a0.resize(T, batch, C);
  for (std::size_t b = 0; b < batch; ++b)
    for (std::size_t t = 0; t < T; ++t)
      for (std::size_t c = 0; c < C; ++c)
        a0.step(t)[b * C + c] = inputs[(b * T + t) * C + c];
  for (std::size_t i = 0; i < layers_.size(); ++i)
    layers_[i]->forward(params.data() + offsets_[i], acts_[i], acts_[i + 1]);

  const Activations& last = acts_.back();
  const bool seq_head = shapes_.back().sequence;
  output_.resize(batch * kHorizon);
  for (std::size_t b = 0; b < batch; ++b)
    for (std::size_t j = 0; j < kHorizon; ++j)
      output_[b * kHorizon + j] =
          seq_head ? last.step(j)[b] : last.step(0)[b * kHorizon + j];
  cached_batch_ = batch;
  has_cache_ = true;
  return output_;
}

void Network::backward(std::span<const double> params, std::span<const double> upstream,
                       std::span<double> grad, std::span<double> input_grad) {
  if (!has_cache_)
    throw Error(ErrorCode::MissingForwardCache, "backward() called before forward()");
  const std::size_t batch = cached_batch_;
  if (params.size() != param_count_ || grad.size() != param_count_)
    throw Error(ErrorCode::ShapeMismatch, "parameter/gradient vector size mismatch");
  if (upstream.size() != batch * kHorizon)
    throw Error(ErrorCode::ShapeMismatch, "upstream gradient has the wrong size");
  const std::size_t T = spec_.timesteps, C = spec_.channels;
  const bool want_input = !input_grad.empty();
  if (want_input && input_grad.size() != batch * T * C)
    throw Error(ErrorCode::ShapeMismatch, "input gradient buffer has the wrong size");

  const Activations& last = acts_.back();
  const bool seq_head = shapes_.back().sequence;
  Activations& g_last = grads_.back();
  g_last.resize(last.steps, last.batch, last.channels);
  for (std::size_t b = 0; b < batch; ++b)
    for (std::size_t j = 0; j < kHorizon; ++j) {
      const double u = upstream[b * kHorizon + j];
      if (seq_head) g_last.step(j)[b] = u;
      else g_last.step(0)[b * kHorizon + j] = u;
    }
  for (std::size_t i = layers_.size(); i-- > 0;) {
    Activations* din = (i > 0 || want_input) ? &grads_[i] : nullptr;
    layers_[i]->backward(params.data() + offsets_[i], acts_[i], acts_[i + 1],
                         grads_[i + 1], grad.data() + offsets_[i], din);
  }
  if (want_input) {
    const Activations& g0 = grads_[0];
    for (std::size_t b = 0; b < batch; ++b)
      for (std::size_t t = 0; t < T; ++t)
        for (std::size_t c = 0; c < C; ++c)
          input_grad[(b * T + t) * C + c] = g0.step(t)[b * C + c];
  }
}

namespace {

std::span<const double> sample_input(const ModelSpec& spec, const Tensor& input) {
  if (input.size() != spec.timesteps * spec.channels)
    throw Error(ErrorCode::ShapeMismatch, "input tensor does not match the spec's input shape");
  return input.data();
}

}  // namespace

std::vector<double> model_forward(const ModelSpec& spec, const ParamStore& params,
                                  const Tensor& input) {
  Network net(spec);
  const auto out = net.forward(params.values, sample_input(spec, input), 1);
  return {out.begin(), out.end()};
}

ModelGradient model_backward(const ModelSpec& spec, const ParamStore& params,
                             const Tensor& input, std::span<const double> upstream) {
  Network net(spec);
  net.forward(params.values, sample_input(spec, input), 1);
  ModelGradient g;
  g.params.assign(params.size(), 0.0);
  g.input.assign(input.size(), 0.0);
  net.backward(params.values, upstream, g.params, g.input);
  return g;
}

}  // namespace stlf::nn
