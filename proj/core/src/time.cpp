#include "diagq/time.hpp"

#include <cstdio>
#include <stdexcept>

namespace diagq {

namespace {

constexpr std::int64_t kMillisPerDay = 86'400'000;

// Days since 1970-01-01 for a civil date (Howard Hinnant's algorithm).
std::int64_t days_from_civil(int y, int m, int d) {
  y -= m <= 2;
  const std::int64_t era = (y >= 0 ? y : y - 399) / 400;
  const unsigned yoe = static_cast<unsigned>(y - era * 400);
  const unsigned doy = (153u * static_cast<unsigned>(m + (m > 2 ? -3 : 9)) + 2) / 5 + static_cast<unsigned>(d) - 1;
  const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
  return era * 146097 + static_cast<std::int64_t>(doe) - 719468;
}

Date civil_from_days(std::int64_t z) {
  z += 719468;
  const std::int64_t era = (z >= 0 ? z : z - 146096) / 146097;
  const unsigned doe = static_cast<unsigned>(z - era * 146097);
  const unsigned yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
  const std::int64_t y = static_cast<std::int64_t>(yoe) + era * 400;
  const unsigned doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
  const unsigned mp = (5 * doy + 2) / 153;
  const unsigned d = doy - (153 * mp + 2) / 5 + 1;
  const unsigned m = mp + (mp < 10 ? 3 : -9);
  return Date{static_cast<int>(y + (m <= 2)), static_cast<int>(m), static_cast<int>(d)};
}

[[noreturn]] void bad_time(std::string_view text) {
  throw std::runtime_error("invalid date/time: '" + std::string(text) + "'");
}

}  // namespace

Date parse_date(std::string_view text) {
  return date_of(parse_timestamp(text));
}

Timestamp parse_timestamp(std::string_view text) {
  int y = 0, mo = 0, d = 0, h = 0, mi = 0, s = 0, ms = 0;
  char tail = 0;
  std::string buf(text);
  int n = std::sscanf(buf.c_str(), "%d-%d-%d %d:%d:%d.%d%c", &y, &mo, &d, &h, &mi, &s, &ms, &tail);
  if (n != 3 && n != 6 && n != 7) bad_time(text);
  if (mo < 1 || mo > 12 || d < 1 || d > 31) bad_time(text);
  if (h < 0 || h > 23 || mi < 0 || mi > 59 || s < 0 || s > 60 || ms < 0 || ms > 999) bad_time(text);
  std::int64_t millis = days_from_civil(y, mo, d) * kMillisPerDay;
  millis += ((static_cast<std::int64_t>(h) * 60 + mi) * 60 + s) * 1000 + ms;
  return Timestamp{millis};
}

std::string format_date(const Date& d) {
  char buf[16];
  std::snprintf(buf, sizeof(buf), "%04d-%02d-%02d", d.year, d.month, d.day);
  return buf;
}

std::string format_timestamp(const Timestamp& t) {
  std::int64_t days = t.millis / kMillisPerDay;
  std::int64_t rem = t.millis % kMillisPerDay;
  if (rem < 0) {
    rem += kMillisPerDay;
    --days;
  }
  Date d = civil_from_days(days);
  int ms = static_cast<int>(rem % 1000);
  int total_s = static_cast<int>(rem / 1000);
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%04d-%02d-%02d %02d:%02d:%02d.%03d", d.year, d.month, d.day,
                total_s / 3600, (total_s / 60) % 60, total_s % 60, ms);
  return buf;
}

Timestamp to_timestamp(const Date& d) {
  return Timestamp{days_from_civil(d.year, d.month, d.day) * kMillisPerDay};
}

Date date_of(const Timestamp& t) {
  std::int64_t days = t.millis / kMillisPerDay;
  if (t.millis % kMillisPerDay < 0) --days;
  return civil_from_days(days);
}

}  // namespace diagq
