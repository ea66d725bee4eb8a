#include "confokit/timestamp.hpp"

#include <array>
#include <cctype>
#include <cstdio>

namespace confokit {

namespace {

constexpr std::int64_t k_millis_per_day = 86'400'000;

bool is_digit(char c) { return c >= '0' && c <= '9'; }

// Reads exactly `width` digits; returns false on anything shorter.
bool read_digits(std::string_view text, std::size_t& pos, int width, int& out) {
  if (pos + static_cast<std::size_t>(width) > text.size()) return false;
  int value = 0;
  for (int i = 0; i < width; ++i) {
    char c = text[pos + static_cast<std::size_t>(i)];
    if (!is_digit(c)) return false;
    value = value * 10 + (c - '0');
  }
  pos += static_cast<std::size_t>(width);
  out = value;
  return true;
}

bool valid_civil(int year, int month, int day) {
  if (month < 1 || month > 12 || day < 1) return false;
  static constexpr std::array<int, 12> lengths = {31, 28, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31};
  int max_day = lengths[static_cast<std::size_t>(month - 1)];
  bool leap = (year % 4 == 0 && year % 100 != 0) || year % 400 == 0;
  if (month == 2 && leap) max_day = 29;
  return day <= max_day;
}

std::optional<Timestamp> assemble(int year, int month, int day, int hour, int minute, int second,
                                  int milli, std::int64_t offset_minutes) {
  if (!valid_civil(year, month, day)) return std::nullopt;
  if (hour > 23 || minute > 59 || second > 60) return std::nullopt;
  std::int64_t days = days_from_civil(year, static_cast<unsigned>(month), static_cast<unsigned>(day));
  std::int64_t millis = days * k_millis_per_day +
                        (static_cast<std::int64_t>(hour) * 3600 + minute * 60 + second) * 1000 + milli;
  millis -= offset_minutes * 60'000;
  return Timestamp{millis};
}

}  // namespace

std::int64_t days_from_civil(int y, unsigned m, unsigned d) {
  y -= m <= 2;
  const std::int64_t era = (y >= 0 ? y : y - 399) / 400;
  const unsigned yoe = static_cast<unsigned>(y - era * 400);
  const unsigned doy = (153 * (m + (m > 2 ? -3 : 9)) + 2) / 5 + d - 1;
  const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
  return era * 146097 + static_cast<std::int64_t>(doe) - 719468;
}

CivilDate civil_from_days(std::int64_t z) {
  z += 719468;
  const std::int64_t era = (z >= 0 ? z : z - 146096) / 146097;
  const unsigned doe = static_cast<unsigned>(z - era * 146097);
  const unsigned yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
  const std::int64_t y = static_cast<std::int64_t>(yoe) + era * 400;
  const unsigned doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
  const unsigned mp = (5 * doy + 2) / 153;
  const unsigned d = doy - (153 * mp + 2) / 5 + 1;
  const unsigned m = mp + (mp < 10 ? 3 : -9);
  return CivilDate{static_cast<int>(y + (m <= 2)), m, d};
}

std::optional<Timestamp> parse_iso8601(std::string_view text) {
  std::size_t pos = 0;
  int year = 0, month = 0, day = 0;
  if (!read_digits(text, pos, 4, year)) return std::nullopt;
  if (pos >= text.size() || text[pos] != '-') return std::nullopt;
  ++pos;
  if (!read_digits(text, pos, 2, month)) return std::nullopt;
  if (pos >= text.size() || text[pos] != '-') return std::nullopt;
  ++pos;
  if (!read_digits(text, pos, 2, day)) return std::nullopt;

  int hour = 0, minute = 0, second = 0, milli = 0;
  std::int64_t offset_minutes = 0;
  if (pos < text.size()) {
    if (text[pos] != 'T' && text[pos] != ' ') return std::nullopt;
    ++pos;
    if (!read_digits(text, pos, 2, hour)) return std::nullopt;
    if (pos >= text.size() || text[pos] != ':') return std::nullopt;
    ++pos;
    if (!read_digits(text, pos, 2, minute)) return std::nullopt;
    if (pos < text.size() && text[pos] == ':') {
      ++pos;
      if (!read_digits(text, pos, 2, second)) return std::nullopt;
      if (pos < text.size() && text[pos] == '.') {
        ++pos;
        // Up to nine fractional digits accepted; only milliseconds kept.
        int scale = 100;
        int digits = 0;
        while (pos < text.size() && is_digit(text[pos])) {
          if (digits < 3) milli += (text[pos] - '0') * scale;
          scale /= 10;
          ++digits;
          ++pos;
        }
        if (digits == 0) return std::nullopt;
      }
    }
    if (pos < text.size()) {
      char z = text[pos];
      if (z == 'Z') {
        ++pos;
      } else if (z == '+' || z == '-') {
        ++pos;
        int oh = 0, om = 0;
        if (!read_digits(text, pos, 2, oh)) return std::nullopt;
        if (pos < text.size() && text[pos] == ':') ++pos;
        if (pos < text.size() && is_digit(text[pos])) {
          if (!read_digits(text, pos, 2, om)) return std::nullopt;
        }
        offset_minutes = static_cast<std::int64_t>(oh) * 60 + om;
        if (z == '-') offset_minutes = -offset_minutes;
      }
    }
  }
  if (pos != text.size()) return std::nullopt;
  return assemble(year, month, day, hour, minute, second, milli, offset_minutes);
}

std::optional<Timestamp> parse_timestamp_pattern(std::string_view text, std::string_view pattern) {
  std::size_t pos = 0;
  int year = 1970, month = 1, day = 1, hour = 0, minute = 0, second = 0;
  for (std::size_t pi = 0; pi < pattern.size(); ++pi) {
    char pc = pattern[pi];
    if (pc == '%' && pi + 1 < pattern.size()) {
      char directive = pattern[++pi];
      switch (directive) {
        case 'Y':
          if (!read_digits(text, pos, 4, year)) return std::nullopt;
          break;
        case 'y': {
          int short_year = 0;
          if (!read_digits(text, pos, 2, short_year)) return std::nullopt;
          year = 2000 + short_year;
          break;
        }
        case 'm':
          if (!read_digits(text, pos, 2, month)) return std::nullopt;
          break;
        case 'd':
          if (!read_digits(text, pos, 2, day)) return std::nullopt;
          break;
        case 'H':
          if (!read_digits(text, pos, 2, hour)) return std::nullopt;
          break;
        case 'M':
          if (!read_digits(text, pos, 2, minute)) return std::nullopt;
          break;
        case 'S':
          if (!read_digits(text, pos, 2, second)) return std::nullopt;
          break;
        case '%':
          if (pos >= text.size() || text[pos] != '%') return std::nullopt;
          ++pos;
          break;
        default:
          return std::nullopt;  // unsupported directive
      }
    } else {
      if (pos >= text.size() || text[pos] != pc) return std::nullopt;
      ++pos;
    }
  }
  if (pos != text.size()) return std::nullopt;
  return assemble(year, month, day, hour, minute, second, 0, 0);
}

std::string format_iso8601(Timestamp ts) {
  std::int64_t days = ts.millis / k_millis_per_day;
  std::int64_t rem = ts.millis % k_millis_per_day;
  if (rem < 0) {
    rem += k_millis_per_day;
    --days;
  }
  CivilDate date = civil_from_days(days);
  int hour = static_cast<int>(rem / 3'600'000);
  int minute = static_cast<int>(rem / 60'000 % 60);
  int second = static_cast<int>(rem / 1000 % 60);
  int milli = static_cast<int>(rem % 1000);
  char buffer[40];
  if (milli != 0) {
    std::snprintf(buffer, sizeof buffer, "%04d-%02u-%02uT%02d:%02d:%02d.%03d", date.year, date.month,
                  date.day, hour, minute, second, milli);
  } else {
    std::snprintf(buffer, sizeof buffer, "%04d-%02u-%02uT%02d:%02d:%02d", date.year, date.month,
                  date.day, hour, minute, second);
  }
  return buffer;
}

Timestamp floor_to_day(Timestamp ts) {
  std::int64_t days = ts.millis / k_millis_per_day;
  if (ts.millis % k_millis_per_day < 0) --days;
  return Timestamp{days * k_millis_per_day};
}

Timestamp floor_to_week(Timestamp ts) {
  std::int64_t days = floor_to_day(ts).millis / k_millis_per_day;
  // 1970-01-01 was a Thursday; shift so Monday is 0.
  std::int64_t dow = (days % 7 + 7 + 3) % 7;
  return Timestamp{(days - dow) * k_millis_per_day};
}

Timestamp floor_to_month(Timestamp ts) {
  std::int64_t days = floor_to_day(ts).millis / k_millis_per_day;
  CivilDate date = civil_from_days(days);
  return Timestamp{days_from_civil(date.year, date.month, 1) * k_millis_per_day};
}

}  // namespace confokit
