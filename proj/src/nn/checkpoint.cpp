#include "stlf/nn/checkpoint.hpp"

#include "stlf/error.hpp"
#include "stlf/io.hpp"

namespace stlf::nn {

using nlohmann::json;

json spec_to_json(const ModelSpec& spec) {
  json layers = json::array();
  for (const auto& layer : spec.layers) {
    json l;
    l["type"] = std::string(layer_type_name(layer));
    std::visit(
        [&](const auto& v) {
          using T = std::decay_t<decltype(v)>;
          if constexpr (std::is_same_v<T, Dense> || std::is_same_v<T, TimeDistributedDense>) {
            l["units"] = v.units;
            l["activation"] = std::string(activation_name(v.activation));
          } else if constexpr (std::is_same_v<T, Conv1D>) {
            l["filters"] = v.filters;
            l["kernel"] = v.kernel;
            l["stride"] = v.stride;
          } else if constexpr (std::is_same_v<T, MaxPool1D>) {
            l["size"] = v.size;
          } else if constexpr (std::is_same_v<T, Lstm> || std::is_same_v<T, BiLstm>) {
            l["units"] = v.units;
            l["return_sequences"] = v.return_sequences;
          }
        },
        layer);
    layers.push_back(std::move(l));
  }
  return json{{"timesteps", spec.timesteps}, {"channels", spec.channels}, {"layers", layers}};
}

ModelSpec spec_from_json(const json& j) {
  try {
    ModelSpec s;
    s.timesteps = j.at("timesteps").get<std::size_t>();
    s.channels = j.at("channels").get<std::size_t>();
    for (const auto& l : j.at("layers")) {
      const auto type = l.at("type").get<std::string>();
      if (type == "dense") {
        s.layers.push_back(Dense{l.at("units").get<std::size_t>(),
                                 parse_activation(l.at("activation").get<std::string>())});
      } else if (type == "time_distributed_dense") {
        s.layers.push_back(TimeDistributedDense{
            l.at("units").get<std::size_t>(),
            parse_activation(l.at("activation").get<std::string>())});
      } else if (type == "conv1d") {
        s.layers.push_back(Conv1D{l.at("filters").get<std::size_t>(),
                                  l.at("kernel").get<std::size_t>(),
                                  l.at("stride").get<std::size_t>()});
      } else if (type == "maxpool1d") {
        s.layers.push_back(MaxPool1D{l.at("size").get<std::size_t>()});
      } else if (type == "flatten") {
        s.layers.push_back(Flatten{});
      } else if (type == "lstm") {
        s.layers.push_back(Lstm{l.at("units").get<std::size_t>(),
                                l.at("return_sequences").get<bool>()});
      } else if (type == "bilstm") {
        s.layers.push_back(BiLstm{l.at("units").get<std::size_t>(),
                                  l.at("return_sequences").get<bool>()});
      } else {
        throw Error(ErrorCode::BadCheckpoint, "unknown layer type '" + type + "'");
      }
    }
    infer_shapes(s);
    return s;
  } catch (const json::exception& e) {
    throw Error(ErrorCode::BadCheckpoint, std::string("malformed model spec: ") + e.what());
  }
}

std::string checkpoint_to_string(const Checkpoint& c) {
  std::string out = "{\n";
  out += "  \"format_version\": " + std::to_string(c.format_version) + ",\n";
  out += "  \"model\": " + json(std::string(model_kind_name(c.kind))).dump() + ",\n";
  out += "  \"spec\": " + (c.spec ? spec_to_json(*c.spec).dump() : std::string("null")) + ",\n";
  out += "  \"seed\": " + std::to_string(c.seed) + ",\n";
  if (c.norm) {
    out += "  \"norm\": {\"x_min\": " + io::format_double(c.norm->x_min) +
           ", \"x_max\": " + io::format_double(c.norm->x_max) + "},\n";
  } else {
    out += "  \"norm\": null,\n";
  }
  out += "  \"params\": [";
  for (std::size_t i = 0; i < c.params.size(); ++i) {
    if (i > 0) out += (i % 8 == 0) ? ",\n    " : ", ";
    out += io::format_double(c.params[i]);
  }
  out += "]\n}\n";
  return out;
}

Checkpoint checkpoint_from_string(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::BadCheckpoint, std::string("checkpoint is not valid JSON: ") + e.what());
  }
  try {
    Checkpoint c;
    c.format_version = j.at("format_version").get<int>();
    if (c.format_version != kCheckpointFormatVersion)
      throw Error(ErrorCode::BadCheckpoint,
                  "unsupported checkpoint format_version " + std::to_string(c.format_version));
    c.kind = parse_model_kind(j.at("model").get<std::string>());
    if (!j.at("spec").is_null()) c.spec = spec_from_json(j.at("spec"));
    c.seed = j.at("seed").get<std::uint64_t>();
    if (!j.at("norm").is_null())
      c.norm = data::NormParams{j.at("norm").at("x_min").get<double>(),
                                j.at("norm").at("x_max").get<double>()};
    c.params = j.at("params").get<std::vector<double>>();
    if (c.spec && c.params.size() != param_count(*c.spec))
      throw Error(ErrorCode::BadCheckpoint, "parameter array does not match the spec");
    if (!c.spec && c.kind != ModelKind::naive)
      throw Error(ErrorCode::BadCheckpoint, "network checkpoint without a spec");
    return c;
  } catch (const json::exception& e) {
    throw Error(ErrorCode::BadCheckpoint, std::string("malformed checkpoint: ") + e.what());
  }
}

void save_checkpoint(const std::filesystem::path& path, const Checkpoint& c) {
  io::write_file_atomic(path, checkpoint_to_string(c));
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
  return checkpoint_from_string(io::read_file(path));
}

}  // namespace stlf::nn
