#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "stlf/data.hpp"
#include "stlf/nn/model.hpp"

namespace stlf::nn {

inline constexpr int kCheckpointFormatVersion = 1;

nlohmann::json spec_to_json(const ModelSpec& spec);
ModelSpec spec_from_json(const nlohmann::json& j);

// A trained model (or the parameter-free naive baseline, which has no spec
// and no parameters).
struct Checkpoint {
  int format_version = kCheckpointFormatVersion;
  ModelKind kind = ModelKind::naive;
  std::optional<ModelSpec> spec;
  std::uint64_t seed = 0;
  std::vector<double> params;
  std::optional<data::NormParams> norm;
};

// Deterministic text: fixed key order, parameters at 17 significant digits.
std::string checkpoint_to_string(const Checkpoint& c);
Checkpoint checkpoint_from_string(const std::string& text);

void save_checkpoint(const std::filesystem::path& path, const Checkpoint& c);
Checkpoint load_checkpoint(const std::filesystem::path& path);

}  // namespace stlf::nn
