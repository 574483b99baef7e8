#pragma once

#include <cstdint>
#include <optional>
#include <string>

namespace autojournal {

struct CivilDate {
  int year = 1970;
  unsigned month = 1;
  unsigned day = 1;
  bool operator==(const CivilDate&) const = default;
  auto operator<=>(const CivilDate&) const = default;
};

std::int64_t days_from_civil(const CivilDate& d);
CivilDate civil_from_days(std::int64_t days);

// Strict YYYY-MM-DD.
std::optional<CivilDate> parse_date(const std::string& text);
std::string format_date(const CivilDate& d);

// Local midnight-to-midnight window of `date` in epoch ms.
std::pair<std::int64_t, std::int64_t> day_window_ms(const CivilDate& date, int utc_offset_minutes);

// HH:MM:SS of an epoch-ms instant shifted by the offset.
std::string format_clock(std::int64_t epoch_ms, int utc_offset_minutes);
// YYYY-MM-DD HH:MM:SS
std::string format_datetime(std::int64_t epoch_ms, int utc_offset_minutes);

}  // namespace autojournal
