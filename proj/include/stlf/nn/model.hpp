#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "stlf/nn/layers.hpp"
#include "stlf/tensor.hpp"

namespace stlf::nn {

struct Dense {
  std::size_t units = 0;
  Activation activation = Activation::linear;
};
struct Conv1D {
  std::size_t filters = 0;
  std::size_t kernel = 0;
  std::size_t stride = 1;
};
struct MaxPool1D {
  std::size_t size = 2;
};
struct Flatten {};
struct Lstm {
  std::size_t units = 0;
  bool return_sequences = false;
};
struct BiLstm {
  std::size_t units = 0;  // per direction
  bool return_sequences = false;
};
struct TimeDistributedDense {
  std::size_t units = 0;
  Activation activation = Activation::linear;
};

using LayerSpec =
    std::variant<Dense, Conv1D, MaxPool1D, Flatten, Lstm, BiLstm, TimeDistributedDense>;

std::string_view layer_type_name(const LayerSpec& layer);

// Per-sample activation shape. A non-sequence value is a flat vector
// (steps == 1, sequence == false).
struct Shape {
  std::size_t steps = 1;
  std::size_t channels = 1;
  bool sequence = true;

  friend bool operator==(const Shape&, const Shape&) = default;
};

inline constexpr std::size_t kHorizon = 24;

struct ModelSpec {
  std::size_t timesteps = kHorizon;
  std::size_t channels = 1;
  std::vector<LayerSpec> layers;
};

// Shapes after the input and after each layer (layers.size() + 1 entries).
// Throws ShapeMismatch if layers do not compose or if the final layer is not
// a 24-vector head.
std::vector<Shape> infer_shapes(const ModelSpec& spec);

enum class ModelKind { naive, lstm, bilstm, cnn_lstm, cnn_bilstm };

std::string_view model_kind_name(ModelKind kind);
ModelKind parse_model_kind(std::string_view name);

// Recurrent width of the reference architecture for each kind.
std::size_t default_units(ModelKind kind);

// Reference architectures. `units` overrides the recurrent width (0 keeps
// the default). Throws InvalidConfig for ModelKind::naive.
ModelSpec reference_spec(ModelKind kind, std::size_t units = 0);

// One named matrix inside the flat parameter vector.
struct ParamEntry {
  std::size_t layer = 0;
  std::string layer_name;  // e.g. "bilstm_0"
  std::string name;        // e.g. "fwd_kernel_x"
  std::size_t offset = 0;
  std::size_t rows = 0;
  std::size_t cols = 0;
  bool is_bias = false;
  std::size_t fan_in = 0;
  std::size_t fan_out = 0;

  std::size_t size() const { return rows * cols; }
};

// Storage layout, in order:
//   Dense / TimeDistributedDense: kernel (in x units), bias (units)
//   Conv1D: kernel (kernel*channels x filters, rows ordered tap-major), bias
//   Lstm: kernel_x (in x 4u), kernel_h (u x 4u), bias (4u); the 4u columns
//         hold the input, forget, candidate and output gates in that order
//   BiLstm: fwd_kernel_x, fwd_kernel_h, fwd_bias, rev_kernel_x, rev_kernel_h,
//           rev_bias; the layer emits [h_fwd(t), h_rev(t)] and the linear
//           combination of the two is carried by the next dense layer
std::vector<ParamEntry> param_layout(const ModelSpec& spec);

std::size_t param_count(const ModelSpec& spec);

struct ParamStore {
  std::vector<ParamEntry> layout;
  std::vector<double> values;
  std::vector<double> grads;

  std::size_t size() const { return values.size(); }
  const ParamEntry& entry(std::string_view layer_name, std::string_view name) const;
  std::span<double> slice(const ParamEntry& e) { return {values.data() + e.offset, e.size()}; }
  std::span<const double> slice(const ParamEntry& e) const {
    return {values.data() + e.offset, e.size()};
  }
  // Entry containing flat index i.
  const ParamEntry& owner(std::size_t i) const;
  void zero_grads();
};

// Zero-valued store with the spec's layout.
ParamStore make_param_store(const ModelSpec& spec);

// Glorot-uniform weights, zero biases except LSTM forget-gate biases (1.0).
ParamStore init_params(const ModelSpec& spec, std::uint64_t seed);

struct Activations;
class LayerImpl;

// Executable instance of a spec with reusable buffers for one batch at a
// time. Not thread-safe; use one Network per thread.
class Network {
 public:
  explicit Network(ModelSpec spec);
  ~Network();
  Network(Network&&) noexcept;
  Network& operator=(Network&&) noexcept;

  const ModelSpec& spec() const { return spec_; }
  std::size_t param_count() const { return param_count_; }
  std::size_t input_size() const { return spec_.timesteps * spec_.channels; }

  // inputs: batch x (timesteps * channels) row-major with each sample laid
  // out time-major. Returns batch x 24.
  std::span<const double> forward(std::span<const double> params,
                                  std::span<const double> inputs, std::size_t batch);

  // Accumulates d(sum_b upstream_b . output_b)/d(params) into grad. Requires
  // the preceding forward() on the same params; input_grad (optional)
  // receives batch x input_size values.
  void backward(std::span<const double> params, std::span<const double> upstream,
                std::span<double> grad, std::span<double> input_grad = {});

 private:
  ModelSpec spec_;
  std::vector<Shape> shapes_;
  std::vector<std::size_t> offsets_;
  std::size_t param_count_ = 0;
  std::vector<std::unique_ptr<LayerImpl>> layers_;
  std::vector<Activations> acts_;
  std::vector<Activations> grads_;
  std::vector<double> output_;
  std::size_t cached_batch_ = 0;
  bool has_cache_ = false;
};

// Single-sample convenience wrappers. input is timesteps x channels.
std::vector<double> model_forward(const ModelSpec& spec, const ParamStore& params,
                                  const Tensor& input);

struct ModelGradient {
  std::vector<double> params;
  std::vector<double> input;
};

ModelGradient model_backward(const ModelSpec& spec, const ParamStore& params,
                             const Tensor& input, std::span<const double> upstream);

}  // namespace stlf::nn
