#include <charconv>
#include <cstdio>

#include "stlf/data.hpp"
#include "stlf/error.hpp"

namespace stlf::data {
namespace {

using namespace std::chrono;

int parse_fixed(std::string_view s, std::size_t pos, std::size_t len,
                std::string_view whole) {
  int value = 0;
  if (pos + len > s.size())
    throw Error(ErrorCode::MalformedRow, "bad timestamp '" + std::string(whole) + "'");
  auto [ptr, ec] = std::from_chars(s.data() + pos, s.data() + pos + len, value);
  if (ec != std::errc{} || ptr != s.data() + pos + len)
    throw Error(ErrorCode::MalformedRow, "bad timestamp '" + std::string(whole) + "'");
  return value;
}

void expect(std::string_view s, std::size_t pos, char c, std::string_view whole) {
  if (pos >= s.size() || s[pos] != c)
    throw Error(ErrorCode::MalformedRow, "bad timestamp '" + std::string(whole) + "'");
}

}  // namespace

int HourStamp::hour_of_day() const {
  const std::int64_t h = hours % 24;
  return static_cast<int>(h < 0 ? h + 24 : h);
}

year_month_day HourStamp::date() const {
  std::int64_t days = hours / 24;
  if (hours % 24 < 0) --days;
  return year_month_day{sys_days{std::chrono::days{days}}};
}

HourStamp HourStamp::from_date(year_month_day d, int hour) {
  const auto days = sys_days{d}.time_since_epoch().count();
  return {static_cast<std::int64_t>(days) * 24 + hour};
}

year_month_day parse_date(std::string_view s) {
  const int y = parse_fixed(s, 0, 4, s);
  expect(s, 4, '-', s);
  const int m = parse_fixed(s, 5, 2, s);
  expect(s, 7, '-', s);
  const int d = parse_fixed(s, 8, 2, s);
  const year_month_day ymd{year{y}, month{static_cast<unsigned>(m)},
                           day{static_cast<unsigned>(d)}};
  if (!ymd.ok())
    throw Error(ErrorCode::MalformedRow, "invalid date '" + std::string(s) + "'");
  return ymd;
}

HourStamp parse_timestamp(std::string_view s) {
  if (s.size() < 16)
    throw Error(ErrorCode::MalformedRow, "bad timestamp '" + std::string(s) + "'");
  const year_month_day ymd = parse_date(s.substr(0, 10));
  if (s[10] != 'T' && s[10] != ' ')
    throw Error(ErrorCode::MalformedRow, "bad timestamp '" + std::string(s) + "'");
  const int hh = parse_fixed(s, 11, 2, s);
  expect(s, 13, ':', s);
  const int mm = parse_fixed(s, 14, 2, s);
  std::size_t pos = 16;
  int ss = 0;
  if (pos < s.size() && s[pos] == ':') {
    ss = parse_fixed(s, pos + 1, 2, s);
    pos += 3;
  }
  std::string_view zone = s.substr(pos);
  if (!(zone.empty() || zone == "Z" || zone == "+00:00"))
    throw Error(ErrorCode::MalformedRow, "non-UTC timestamp '" + std::string(s) + "'");
  if (hh > 23 || mm > 59 || ss > 59)
    throw Error(ErrorCode::MalformedRow, "bad timestamp '" + std::string(s) + "'");
  if (mm != 0 || ss != 0)
    throw Error(ErrorCode::NonHourlySpacing,
                "timestamp not on an hour boundary: '" + std::string(s) + "'");
  return HourStamp::from_date(ymd, hh);
}

std::string format_date(year_month_day d) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", static_cast<int>(d.year()),
                static_cast<unsigned>(d.month()), static_cast<unsigned>(d.day()));
  return buf;
}

std::string format_timestamp(HourStamp t) {
  char buf[8];
  std::snprintf(buf, sizeof buf, "T%02d", t.hour_of_day());
  return format_date(t.date()) + buf + ":00:00Z";
}

}  // namespace stlf::data
