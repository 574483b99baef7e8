#include "autojournal/timefmt.hpp"

#include <cstdio>
#include <regex>

namespace autojournal {

namespace {

std::int64_t floor_div(std::int64_t a, std::int64_t b) {
  std::int64_t q = a / b;
  if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
  return q;
}

}  // namespace

// Civil-from-days arithmetic on the proleptic Gregorian calendar.
std::int64_t days_from_civil(const CivilDate& d) {
  const std::int64_t y = static_cast<std::int64_t>(d.year) - (d.month <= 2 ? 1 : 0);
  const std::int64_t era = floor_div(y, 400);
  const std::int64_t yoe = y - era * 400;
  const std::int64_t mp = (d.month + 9) % 12;
  const std::int64_t doy = (153 * mp + 2) / 5 + d.day - 1;
  const std::int64_t doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
  return era * 146097 + doe - 719468;
}

CivilDate civil_from_days(std::int64_t z) {
  z += 719468;
  const std::int64_t era = floor_div(z, 146097);
  const std::int64_t doe = z - era * 146097;
  const std::int64_t yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
  const std::int64_t doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
  const std::int64_t mp = (5 * doy + 2) / 153;
  const auto day = static_cast<unsigned>(doy - (153 * mp + 2) / 5 + 1);
  const auto month = static_cast<unsigned>(mp < 10 ? mp + 3 : mp - 9);
  const auto year = static_cast<int>(yoe + era * 400 + (month <= 2 ? 1 : 0));
  return {year, month, day};
}

std::optional<CivilDate> parse_date(const std::string& text) {
  static const std::regex re(R"(^(\d{4})-(\d{2})-(\d{2})$)");
  std::smatch m;
  if (!std::regex_match(text, m, re)) return std::nullopt;
  CivilDate d{std::stoi(m[1]), static_cast<unsigned>(std::stoi(m[2])),
              static_cast<unsigned>(std::stoi(m[3]))};
  if (d.month < 1 || d.month > 12 || d.day < 1) return std::nullopt;
  // Round-trip rejects 2024-02-30 and friends.
  if (civil_from_days(days_from_civil(d)) != d) return std::nullopt;
  return d;
}

std::string format_date(const CivilDate& d) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", d.year, d.month, d.day);
  return buf;
}

std::pair<std::int64_t, std::int64_t> day_window_ms(const CivilDate& date, int utc_offset_minutes) {
  const std::int64_t start = days_from_civil(date) * 86'400'000LL -
                             static_cast<std::int64_t>(utc_offset_minutes) * 60'000LL;
  return {start, start + 86'400'000LL};
}

std::string format_clock(std::int64_t epoch_ms, int utc_offset_minutes) {
  const std::int64_t local = epoch_ms + static_cast<std::int64_t>(utc_offset_minutes) * 60'000LL;
  const std::int64_t secs_of_day = floor_div(local, 1000) - floor_div(local, 86'400'000LL) * 86'400;
  char buf[16];
  std::snprintf(buf, sizeof buf, "%02d:%02d:%02d", static_cast<int>(secs_of_day / 3600),
                static_cast<int>(secs_of_day / 60 % 60), static_cast<int>(secs_of_day % 60));
  return buf;
}

std::string format_datetime(std::int64_t epoch_ms, int utc_offset_minutes) {
  const std::int64_t local = epoch_ms + static_cast<std::int64_t>(utc_offset_minutes) * 60'000LL;
  return format_date(civil_from_days(floor_div(local, 86'400'000LL))) + " " +
         format_clock(epoch_ms, utc_offset_minutes);
}

}  // namespace autojournal
