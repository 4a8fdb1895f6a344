#include "promocast/date.hpp"

#include <charconv>
#include <cstdio>

#include "promocast/error.hpp"

namespace promocast {
namespace {

// Civil-from-days / days-from-civil after H. Hinnant's public-domain algorithms.
std::int32_t days_from_civil(int y, unsigned m, unsigned d) {
  y -= m <= 2;
  const int era = (y >= 0 ? y : y - 399) / 400;
  const unsigned yoe = static_cast<unsigned>(y - era * 400);
  const unsigned doy = (153 * (m > 2 ? m - 3 : m + 9) + 2) / 5 + d - 1;
  const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
  return era * 146097 + static_cast<int>(doe) - 719468;
}

struct Civil {
  int year;
  unsigned month;
  unsigned day;
};

Civil civil_from_days(std::int32_t z) {
  z += 719468;
  const int era = (z >= 0 ? z : z - 146096) / 146097;
  const unsigned doe = static_cast<unsigned>(z - era * 146097);
  const unsigned yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
  const int y = static_cast<int>(yoe) + era * 400;
  const unsigned doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
  const unsigned mp = (5 * doy + 2) / 153;
  const unsigned d = doy - (153 * mp + 2) / 5 + 1;
  const unsigned m = mp < 10 ? mp + 3 : mp - 9;
  return {y + (m <= 2), m, d};
}

}  // namespace

bool is_leap_year(int year) {
  return (year % 4 == 0 && year % 100 != 0) || year % 400 == 0;
}

unsigned days_in_month(int year, unsigned month) {
  static constexpr unsigned kDays[] = {31, 28, 31, 30, 31, 30,
                                       31, 31, 30, 31, 30, 31};
  if (month == 2 && is_leap_year(year)) return 29;
  return kDays[month - 1];
}

Date Date::from_ymd(int year, unsigned month, unsigned day) {
  if (month < 1 || month > 12) {
    throw InvalidArgument("month out of range: " + std::to_string(month));
  }
  if (day < 1 || day > days_in_month(year, month)) {
    throw InvalidArgument("day out of range: " + std::to_string(day));
  }
  return Date(days_from_civil(year, month, day));
}

Date Date::parse(std::string_view text) {
  if (text.size() != 10 || text[4] != '-' || text[7] != '-') {
    throw ParseError("expected date YYYY-MM-DD, got '" + std::string(text) +
                     "'");
  }
  auto number = [&](std::size_t pos, std::size_t len) {
    int value = 0;
    const char* first = text.data() + pos;
    const char* last = first + len;
    auto [ptr, ec] = std::from_chars(first, last, value);
    if (ec != std::errc() || ptr != last) {
      throw ParseError("expected date YYYY-MM-DD, got '" + std::string(text) +
                       "'");
    }
    return value;
  };
  const int y = number(0, 4);
  const int m = number(5, 2);
  const int d = number(8, 2);
  if (m < 1 || m > 12 || d < 1 ||
      d > static_cast<int>(days_in_month(y, static_cast<unsigned>(m)))) {
    throw ParseError("invalid calendar date '" + std::string(text) + "'");
  }
  return Date(days_from_civil(y, static_cast<unsigned>(m),
                              static_cast<unsigned>(d)));
}

int Date::year() const { return civil_from_days(days_).year; }
unsigned Date::month() const { return civil_from_days(days_).month; }
unsigned Date::day() const { return civil_from_days(days_).day; }

unsigned Date::day_of_year() const {
  const Civil c = civil_from_days(days_);
  return static_cast<unsigned>(days_ - days_from_civil(c.year, 1, 1)) + 1;
}

unsigned Date::weekday() const {
  // 1970-01-01 was a Thursday (index 3).
  const int w = (days_ % 7 + 7 + 3) % 7;
  return static_cast<unsigned>(w);
}

std::string Date::to_string() const {
  const Civil c = civil_from_days(days_);
  char buf[16];
  std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", c.year, c.month, c.day);
  return buf;
}

}  // namespace promocast
