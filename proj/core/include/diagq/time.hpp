#pragma once

#include <compare>
#include <cstdint>
#include <string>
#include <string_view>

namespace diagq {

/// Calendar date (proleptic Gregorian).
struct Date {
  int year = 1970;
  int month = 1;
  int day = 1;

  auto operator<=>(const Date&) const = default;
};

/// Point in time as milliseconds since 1970-01-01 00:00:00 UTC.
struct Timestamp {
  std::int64_t millis = 0;

  auto operator<=>(const Timestamp&) const = default;
};

/// Accepts "YYYY-MM-DD"; also tolerates a trailing time-of-day, which is
/// ignored (metadata files carry dates as full timestamps).
Date parse_date(std::string_view text);

/// Accepts "YYYY-MM-DD", "YYYY-MM-DD HH:MM:SS" and "YYYY-MM-DD HH:MM:SS.mmm".
Timestamp parse_timestamp(std::string_view text);

std::string format_date(const Date& d);

/// Formats as "YYYY-MM-DD HH:MM:SS.mmm".
std::string format_timestamp(const Timestamp& t);

Timestamp to_timestamp(const Date& d);
Date date_of(const Timestamp& t);

}  // namespace diagq
