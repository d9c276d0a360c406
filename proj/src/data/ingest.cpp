#include <charconv>
#include <cmath>
#include <string>

#include "stlf/data.hpp"
#include "stlf/error.hpp"
#include "stlf/io.hpp"

namespace stlf::data {
namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.back() == '\r' || s.back() == ' ' || s.back() == '\t'))
    s.remove_suffix(1);
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  return s;
}

std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t pos = 0;
  while (true) {
    const std::size_t comma = line.find(',', pos);
    out.push_back(trim(line.substr(pos, comma - pos)));
    if (comma == std::string_view::npos) break;
    pos = comma + 1;
  }
  return out;
}

std::string row_label(std::size_t line_no) {
  return "line " + std::to_string(line_no);
}

double parse_kw(std::string_view field, std::size_t line_no) {
  double v = 0.0;
  if (field.empty())
    throw Error(ErrorCode::MalformedRow, row_label(line_no) + ": empty value");
  auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
  if (ec != std::errc{} || ptr != field.data() + field.size())
    throw Error(ErrorCode::MalformedRow,
                row_label(line_no) + ": bad number '" + std::string(field) + "'");
  if (!std::isfinite(v) || v < 0.0)
    throw Error(ErrorCode::MalformedRow,
                row_label(line_no) + ": value must be finite and non-negative");
  return v;
}

bool is_household_column(std::string_view name) {
  if (name.size() < 3 || name[0] != 'h') return false;
  for (char c : name.substr(1))
    if (c < '0' || c > '9') return false;
  return true;
}

std::size_t check_header(std::string_view header, CsvLayout layout) {
  const auto cols = split_fields(header);
  if (layout == CsvLayout::aggregated) {
    if (cols.size() != 2 || cols[0] != "timestamp" || cols[1] != "active_power_kw")
      throw Error(ErrorCode::MalformedRow,
                  "expected header 'timestamp,active_power_kw'");
    return 1;
  }
  if (cols.size() < 2 || cols[0] != "timestamp")
    throw Error(ErrorCode::MalformedRow, "expected header 'timestamp,h01,...,hNN'");
  for (std::size_t i = 1; i < cols.size(); ++i)
    if (!is_household_column(cols[i]))
      throw Error(ErrorCode::MalformedRow,
                  "bad household column '" + std::string(cols[i]) + "'");
  return cols.size() - 1;
}

}  // namespace

LoadSeries parse_load_csv_text(std::string_view text, CsvLayout layout,
                               IngestStats* stats) {
  IngestStats local;
  LoadSeries series;
  std::size_t value_cols = 0;
  bool have_header = false;
  HourStamp prev{};
  std::size_t line_no = 0;

  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t nl = text.find('\n', pos);
    if (nl == std::string_view::npos) nl = text.size();
    std::string_view line = trim(text.substr(pos, nl - pos));
    pos = nl + 1;
    ++line_no;
    if (line.empty()) continue;
    if (!have_header) {
      value_cols = check_header(line, layout);
      have_header = true;
      continue;
    }
    const auto fields = split_fields(line);
    if (fields.size() != value_cols + 1)
      throw Error(ErrorCode::MalformedRow,
                  row_label(line_no) + ": expected " + std::to_string(value_cols + 1) +
                      " fields, got " + std::to_string(fields.size()));
    HourStamp t;
    try {
      t = parse_timestamp(fields[0]);
    } catch (const Error& e) {
      throw Error(e.code(), row_label(line_no) + ": " + e.what());
    }
    double total = 0.0;
    for (std::size_t c = 1; c <= value_cols; ++c) total += parse_kw(fields[c], line_no);

    if (series.values.empty()) {
      series.start = t;
    } else {
      const std::int64_t step = t - prev;
      if (step <= 0)
        throw Error(ErrorCode::NonHourlySpacing,
                    row_label(line_no) + ": timestamps must be strictly increasing");
      const std::int64_t missing = step - 1;
      if (missing > kMaxInterpolatedGap)
        throw Error(ErrorCode::GapTooLarge,
                    row_label(line_no) + ": " + std::to_string(missing) +
                        " consecutive hours missing before " + format_timestamp(t));
      const double left = series.values.back();
      for (std::int64_t j = 1; j <= missing; ++j) {
        const double frac = static_cast<double>(j) / static_cast<double>(step);
        series.values.push_back(left + (total - left) * frac);
        ++local.interpolated;
      }
    }
    series.values.push_back(total);
    prev = t;
    ++local.rows;
  }
  if (series.values.empty()) throw Error(ErrorCode::EmptyFile, "no data rows");
  local.households = layout == CsvLayout::per_household ? value_cols : 0;
  if (stats) *stats = local;
  return series;
}

LoadSeries parse_load_csv(const std::filesystem::path& path, CsvLayout layout,
                          IngestStats* stats) {
  const std::string text = io::read_file(path);
  if (text.find_first_not_of(" \t\r\n") == std::string::npos)
    throw Error(ErrorCode::EmptyFile, path.string() + " is empty");
  try {
    return parse_load_csv_text(text, layout, stats);
  } catch (const Error& e) {
    throw Error(e.code(), path.string() + ": " + e.what());
  }
}

void write_series_csv(const std::filesystem::path& path, const LoadSeries& series) {
  std::string out = "timestamp,active_power_kw\n";
  for (std::size_t i = 0; i < series.size(); ++i) {
    out += format_timestamp(series.time_at(i));
    out += ',';
    out += io::format_double(series.values[i]);
    out += '\n';
  }
  io::write_file_atomic(path, out);
}

}  // namespace stlf::data
