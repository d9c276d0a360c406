#include <string>

#include "stlf/data.hpp"
#include "stlf/error.hpp"
#include "stlf/io.hpp"

namespace stlf::data {

Decomposition decompose_additive(const LoadSeries& series, std::size_t period) {
  const std::size_t n = series.size();
  if (period < 2 || n < 2 * period)
    throw Error(ErrorCode::SeriesTooShort,
                "decomposition needs at least " + std::to_string(2 * period) +
                    " samples, got " + std::to_string(n));
  const auto& x = series.values;
  const std::size_t half = period / 2;
  const double p = static_cast<double>(period);

  Decomposition d;
  d.period = period;
  d.trend.assign(n, std::nullopt);
  d.residual.assign(n, std::nullopt);
  d.seasonal.assign(n, 0.0);

  // Even periods use the 2 x period centred average (half-weight endpoints).
  for (std::size_t i = half; i + half < n; ++i) {
    double acc = 0.0;
    if (period % 2 == 0) {
      acc += 0.5 * x[i - half];
      for (std::size_t j = i - half + 1; j < i + half; ++j) acc += x[j];
      acc += 0.5 * x[i + half];
    } else {
      for (std::size_t j = i - half; j <= i + half; ++j) acc += x[j];
    }
    d.trend[i] = acc / p;
  }

  std::vector<double> phase_sum(period, 0.0);
  std::vector<std::size_t> phase_count(period, 0);
  for (std::size_t i = 0; i < n; ++i) {
    if (!d.trend[i]) continue;
    phase_sum[i % period] += x[i] - *d.trend[i];
    ++phase_count[i % period];
  }
  std::vector<double> phase_mean(period, 0.0);
  double grand = 0.0;
  for (std::size_t k = 0; k < period; ++k) {
    phase_mean[k] = phase_sum[k] / static_cast<double>(phase_count[k]);
    grand += phase_mean[k];
  }
  grand /= p;
  for (auto& m : phase_mean) m -= grand;

  for (std::size_t i = 0; i < n; ++i) {
    d.seasonal[i] = phase_mean[i % period];
    if (d.trend[i]) d.residual[i] = x[i] - *d.trend[i] - d.seasonal[i];
  }
  return d;
}

void write_decomposition_csv(const std::filesystem::path& path,
                             const LoadSeries& series, const Decomposition& d) {
  std::string out = "timestamp,observed,trend,seasonal,residual\n";
  for (std::size_t i = 0; i < series.size(); ++i) {
    out += format_timestamp(series.time_at(i));
    out += ',';
    out += io::format_double(series.values[i]);
    out += ',';
    if (d.trend[i]) out += io::format_double(*d.trend[i]);
    out += ',';
    out += io::format_double(d.seasonal[i]);
    out += ',';
    if (d.residual[i]) out += io::format_double(*d.residual[i]);
    out += '\n';
  }
  io::write_file_atomic(path, out);
}

}  // namespace stlf::data
