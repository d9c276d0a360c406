#pragma once

#include <cstddef>
#include <cstdint>
#include <string>

#include "stlf/nn/model.hpp"

namespace stlf::nn {

struct GradCheckOptions {
  std::size_t trials = 200;
  double eps = 1e-5;
  double tol = 1e-4;
  std::uint64_t seed = 0;
  bool check_input = true;
};

struct GradCheckReport {
  double max_rel_error = 0.0;
  std::size_t worst_coordinate = 0;
  std::string worst_layer;   // "<layer>/<tensor>", or "input"
  double worst_analytic = 0.0;
  double worst_numeric = 0.0;
  std::size_t checked = 0;
  bool passed = true;
};

// |a - b| / max(|a|, |b|, 1e-12)
double relative_error(double a, double b);

// Compares Network::backward against central differences of
// f(params) = upstream . model(input) for a random input in [0, 1) and a
// random standard-normal upstream vector. Samples `trials` parameter
// coordinates without replacement (all of them if the model has fewer) and,
// optionally, every input coordinate. Never throws on a failed comparison.
GradCheckReport gradient_check(const ModelSpec& spec, const ParamStore& params,
                               const GradCheckOptions& options = {});

}  // namespace stlf::nn
