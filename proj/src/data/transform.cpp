#include <algorithm>
#include <cmath>

#include "stlf/data.hpp"
#include "stlf/error.hpp"

namespace stlf::data {

SplitSeries split_by_date(const LoadSeries& series, const SplitSpec& spec) {
  if (!spec.train_end.ok() || !spec.valid_end.ok())
    throw Error(ErrorCode::BoundaryOutOfRange, "invalid split date");
  if (!(spec.train_end < spec.valid_end))
    throw Error(ErrorCode::BoundaryOutOfRange, "train_end must precede valid_end");
  // Both boundaries are inclusive of the named day's final hour.
  const HourStamp train_stop = HourStamp::from_date(spec.train_end) + 24;
  const HourStamp valid_stop = HourStamp::from_date(spec.valid_end) + 24;
  if (train_stop <= series.start || valid_stop >= series.end())
    throw Error(ErrorCode::BoundaryOutOfRange,
                "split boundaries " + format_date(spec.train_end) + " / " +
                    format_date(spec.valid_end) + " outside series span " +
                    format_timestamp(series.start) + " .. " +
                    format_timestamp(series.end() + (-1)));
  const auto n_train = static_cast<std::size_t>(train_stop - series.start);
  const auto n_valid = static_cast<std::size_t>(valid_stop - train_stop);
  const auto& v = series.values;
  SplitSeries out;
  out.train = {series.start, {v.begin(), v.begin() + n_train}};
  out.valid = {train_stop, {v.begin() + n_train, v.begin() + n_train + n_valid}};
  out.test = {valid_stop, {v.begin() + n_train + n_valid, v.end()}};
  return out;
}

NormParams fit_minmax(std::span<const double> train) {
  if (train.empty()) throw Error(ErrorCode::Empty, "cannot fit normalization on empty data");
  const auto [lo, hi] = std::minmax_element(train.begin(), train.end());
  if (!(*hi > *lo))
    throw Error(ErrorCode::DegenerateRange, "training range is degenerate (max == min)");
  return {*lo, *hi};
}

std::vector<double> transform_minmax(std::span<const double> x,
                                     const NormParams& p, Direction direction) {
  if (!(p.x_max > p.x_min))
    throw Error(ErrorCode::DegenerateRange, "normalization range is degenerate");
  const double range = p.x_max - p.x_min;
  std::vector<double> out(x.size());
  if (direction == Direction::apply) {
    for (std::size_t i = 0; i < x.size(); ++i) out[i] = (x[i] - p.x_min) / range;
  } else {
    for (std::size_t i = 0; i < x.size(); ++i) out[i] = x[i] * range + p.x_min;
  }
  return out;
}

WindowedDataset build_windows(std::span<const double> normalized,
                              std::size_t in_len, std::size_t out_len,
                              std::size_t stride, const NormParams& norm) {
  if (in_len == 0 || out_len == 0 || stride == 0)
    throw Error(ErrorCode::ShapeMismatch, "window lengths and stride must be positive");
  if (normalized.size() < in_len + out_len)
    throw Error(ErrorCode::SeriesTooShort,
                "series of " + std::to_string(normalized.size()) +
                    " samples is shorter than one " +
                    std::to_string(in_len + out_len) + "-hour frame");
  const std::size_t n = window_count(normalized.size(), in_len, out_len, stride);
  WindowedDataset ds;
  ds.in_len = in_len;
  ds.out_len = out_len;
  ds.norm = norm;
  ds.inputs.reserve(n * in_len);
  ds.targets.reserve(n * out_len);
  for (std::size_t k = 0; k < n; ++k) {
    const auto first = normalized.begin() + static_cast<std::ptrdiff_t>(k * stride);
    ds.inputs.insert(ds.inputs.end(), first, first + static_cast<std::ptrdiff_t>(in_len));
    ds.targets.insert(ds.targets.end(), first + static_cast<std::ptrdiff_t>(in_len),
                      first + static_cast<std::ptrdiff_t>(in_len + out_len));
  }
  return ds;
}

}  // namespace stlf::data
