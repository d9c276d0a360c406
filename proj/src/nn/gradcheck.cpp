#include "stlf/nn/gradcheck.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

namespace stlf::nn {

double relative_error(double a, double b) {
  const double denom = std::max({std::abs(a), std::abs(b), 1e-12});
  return std::abs(a - b) / denom;
}

GradCheckReport gradient_check(const ModelSpec& spec, const ParamStore& params,
                               const GradCheckOptions& options) {
  Network net(spec);
  std::mt19937_64 rng(options.seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::normal_distribution<double> normal(0.0, 1.0);

  std::vector<double> input(net.input_size());
  for (auto& v : input) v = unit(rng);
  std::vector<double> upstream(kHorizon);
  for (auto& v : upstream) v = normal(rng);

  std::vector<double> theta = params.values;
  auto objective = [&](const std::vector<double>& p, const std::vector<double>& x) {
    const auto out = net.forward(p, x, 1);
    double acc = 0.0;
    for (std::size_t j = 0; j < kHorizon; ++j) acc += out[j] * upstream[j];
    return acc;
  };

  std::vector<double> grad(theta.size(), 0.0);
  std::vector<double> input_grad(input.size(), 0.0);
  net.forward(theta, input, 1);
  net.backward(theta, upstream, grad, input_grad);

  std::vector<std::size_t> coords(theta.size());
  std::iota(coords.begin(), coords.end(), 0);
  if (coords.size() > options.trials) {
    // partial Fisher-Yates
    for (std::size_t i = 0; i < options.trials; ++i) {
      std::uniform_int_distribution<std::size_t> pick(i, coords.size() - 1);
      std::swap(coords[i], coords[pick(rng)]);
    }
    coords.resize(options.trials);
  }

  GradCheckReport report;
  auto record = [&](double analytic, double numeric, std::size_t coord, std::string where) {
    const double err = relative_error(analytic, numeric);
    ++report.checked;
    if (err > report.max_rel_error || report.checked == 1) {
      report.max_rel_error = err;
      report.worst_coordinate = coord;
      report.worst_layer = std::move(where);
      report.worst_analytic = analytic;
      report.worst_numeric = numeric;
    }
  };

  for (std::size_t i : coords) {
    const double saved = theta[i];
    theta[i] = saved + options.eps;
    const double up = objective(theta, input);
    theta[i] = saved - options.eps;
    const double down = objective(theta, input);
    theta[i] = saved;
    const auto& e = params.owner(i);
    record(grad[i], (up - down) / (2.0 * options.eps), i, e.layer_name + "/" + e.name);
  }
  if (options.check_input) {
    for (std::size_t i = 0; i < input.size(); ++i) {
      const double saved = input[i];
      input[i] = saved + options.eps;
      const double up = objective(theta, input);
      input[i] = saved - options.eps;
      const double down = objective(theta, input);
      input[i] = saved;
      record(input_grad[i], (up - down) / (2.0 * options.eps), i, "input");
    }
  }
  report.passed = report.max_rel_error < options.tol;
  return report;
}

}  // namespace stlf::nn
