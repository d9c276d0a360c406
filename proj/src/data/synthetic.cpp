#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <random>

#include "stlf/data.hpp"

namespace stlf::data {
namespace {

double bump(double hour, double centre, double width) {
  double dist = std::abs(hour - centre);
  dist = std::min(dist, 24.0 - dist);
  return std::exp(-0.5 * (dist / width) * (dist / width));
}

std::array<double, 24> make_shape() {
  std::array<double, 24> raw{};
  for (int h = 0; h < 24; ++h)
    raw[h] = 0.6 * bump(h, 7.5, 1.5) + 1.0 * bump(h, 19.0, 2.0);
  const auto [lo, hi] = std::minmax_element(raw.begin(), raw.end());
  const double low = *lo;
  const double span = *hi - *lo;
  for (auto& v : raw) v = (v - low) / span;
  return raw;
}

}  // namespace

double daily_shape(int hour_of_day) {
  static const std::array<double, 24> shape = make_shape();
  return shape[static_cast<std::size_t>(((hour_of_day % 24) + 24) % 24)];
}

LoadSeries generate_synthetic(const SyntheticSpec& spec) {
  std::mt19937_64 rng(spec.seed);
  std::normal_distribution<double> noise(0.0, 1.0);
  LoadSeries s;
  s.start = spec.start;
  const std::size_t n = std::max<std::size_t>(spec.days, 2) * 24;
  s.values.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const int hour = s.time_at(i).hour_of_day();
    double v = spec.base + spec.seasonal_amp * daily_shape(hour) +
               spec.trend_slope * (static_cast<double>(i) / 24.0);
    const double z = noise(rng);
    if (spec.noise_sd > 0.0) v += spec.noise_sd * z;
    s.values[i] = std::max(v, 0.0);
  }
  return s;
}

}  // namespace stlf::data
