#pragma once

#include <compare>
#include <cstdint>
#include <string>
#include <string_view>

namespace promocast {

// Currency amount with two fractional digits, held as integer cents so that
// text round-trips are exact.
class Money {
 public:
  constexpr Money() = default;

  static constexpr Money from_cents(std::int64_t cents) { return Money(cents); }
  // Rounds half away from zero to the nearest cent.
  static Money from_double(double amount);
  // Accepts "12", "12.5", "12.50", "-3.1". More than two fractional digits
  // is a ParseError.
  static Money parse(std::string_view text);

  constexpr std::int64_t cents() const { return cents_; }
  double to_double() const { return static_cast<double>(cents_) / 100.0; }
  // Always two fractional digits: "69.00".
  std::string to_string() const;

  constexpr auto operator<=>(const Money&) const = default;

 private:
  constexpr explicit Money(std::int64_t cents) : cents_(cents) {}
  std::int64_t cents_ = 0;
};

}  // namespace promocast
