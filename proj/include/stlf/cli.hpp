#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <string_view>

#include "json.hpp"

#include "stlf/data.hpp"
#include "stlf/nn/model.hpp"
#include "stlf/training.hpp"

namespace stlf::cli {

// Everything a run needs. Defaults reproduce the reference setup: the
// 2019-12-31 / 2020-06-30 split, the BiLSTM model and batch size 384.
struct RunConfig {
  std::string data_path;
  data::CsvLayout layout = data::CsvLayout::aggregated;
  data::SplitSpec split;
  nn::ModelKind model = nn::ModelKind::bilstm;
  std::size_t units = 0;  // 0 keeps the model's default width
  training::TrainConfig train;
  training::GridSpec grid;
  data::SyntheticSpec synth;
  std::string out = "runs/default";
  std::uint64_t seed = 0;
  std::size_t jobs = 1;
};

// The published JSON schema (config/schema.json), compiled in.
std::string_view config_schema();

// Throws Error(BadConfig) naming the first offending JSON pointer.
void validate_config_json(const nlohmann::json& doc);

// Validates, then overlays the document onto the defaults.
RunConfig config_from_json(const nlohmann::json& doc);
RunConfig load_config(const std::string& path);

// Fully resolved configuration, every key present; passes validation.
nlohmann::json config_to_json(const RunConfig& cfg);

// Parses argv, runs one subcommand and returns the process exit status:
// 0 on success, the ErrorCode value on a library error, 2 on a usage error.
int run_command(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace stlf::cli
