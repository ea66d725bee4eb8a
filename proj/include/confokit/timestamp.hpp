#pragma once

#include <compare>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace confokit {

// Absolute instant, UTC, millisecond resolution.
struct Timestamp {
  std::int64_t millis = 0;
  auto operator<=>(const Timestamp&) const = default;
};

struct CivilDate {
  int year = 1970;
  unsigned month = 1;  // 1..12
  unsigned day = 1;    // 1..31
};

// Days since 1970-01-01 for a proleptic Gregorian civil date, and back.
std::int64_t days_from_civil(int year, unsigned month, unsigned day);
CivilDate civil_from_days(std::int64_t days);

// Accepts YYYY-MM-DD, optionally followed by ('T'|' ')HH:MM[:SS[.fff]] and an
// optional zone suffix (Z, +HH:MM, +HHMM, +HH). Offsets are normalized to UTC.
std::optional<Timestamp> parse_iso8601(std::string_view text);

// strptime-style subset: %Y %y %m %d %H %M %S %% plus literal characters.
// Two-digit %y years land in 2000..2099.
std::optional<Timestamp> parse_timestamp_pattern(std::string_view text, std::string_view pattern);

// ISO 8601, seconds precision; ".mmm" appended only when sub-second.
std::string format_iso8601(Timestamp ts);

// Window starts used by the conformance-over-time series.
Timestamp floor_to_day(Timestamp ts);
Timestamp floor_to_week(Timestamp ts);  // ISO weeks, Monday start
Timestamp floor_to_month(Timestamp ts);

}  // namespace confokit
