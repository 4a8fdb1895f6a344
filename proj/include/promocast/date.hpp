#pragma once

#include <compare>
#include <cstdint>
#include <string>
#include <string_view>

namespace promocast {

// A calendar day, stored as days since 1970-01-01 (proleptic Gregorian).
class Date {
 public:
  constexpr Date() = default;
  constexpr explicit Date(std::int32_t days_since_epoch)
      : days_(days_since_epoch) {}

  // Throws InvalidArgument for out-of-range month/day.
  static Date from_ymd(int year, unsigned month, unsigned day);
  // Strict YYYY-MM-DD. Throws ParseError.
  static Date parse(std::string_view text);

  constexpr std::int32_t days_since_epoch() const { return days_; }

  int year() const;
  unsigned month() const;  // 1..12
  unsigned day() const;    // 1..31
  // 1 = Jan 1.
  unsigned day_of_year() const;
  // 0 = Monday ... 6 = Sunday.
  unsigned weekday() const;

  std::string to_string() const;

  constexpr Date operator+(std::int32_t n) const { return Date(days_ + n); }
  constexpr Date operator-(std::int32_t n) const { return Date(days_ - n); }
  constexpr std::int32_t operator-(Date other) const {
    return days_ - other.days_;
  }
  constexpr Date& operator+=(std::int32_t n) {
    days_ += n;
    return *this;
  }

  constexpr auto operator<=>(const Date&) const = default;

 private:
  std::int32_t days_ = 0;
};

bool is_leap_year(int year);
unsigned days_in_month(int year, unsigned month);

}  // namespace promocast
