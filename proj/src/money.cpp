#include "promocast/money.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>

#include "promocast/error.hpp"

namespace promocast {

Money Money::from_double(double amount) {
  if (!std::isfinite(amount)) throw InvalidArgument("non-finite amount");
  return Money(static_cast<std::int64_t>(std::llround(amount * 100.0)));
}

Money Money::parse(std::string_view text) {
  auto fail = [&]() -> Money {
    throw ParseError("invalid amount '" + std::string(text) + "'");
  };
  if (text.empty()) return fail();
  std::size_t i = 0;
  bool negative = false;
  if (text[0] == '-' || text[0] == '+') {
    negative = text[0] == '-';
    ++i;
  }
  std::int64_t whole = 0;
  std::size_t whole_digits = 0;
  for (; i < text.size() && text[i] >= '0' && text[i] <= '9'; ++i) {
    whole = whole * 10 + (text[i] - '0');
    if (++whole_digits > 15) return fail();
  }
  std::int64_t frac = 0;
  std::size_t frac_digits = 0;
  if (i < text.size() && text[i] == '.') {
    ++i;
    for (; i < text.size() && text[i] >= '0' && text[i] <= '9'; ++i) {
      if (++frac_digits > 2) return fail();
      frac = frac * 10 + (text[i] - '0');
    }
    if (frac_digits == 0) return fail();
  }
  if (i != text.size() || whole_digits == 0) return fail();
  if (frac_digits == 1) frac *= 10;
  const std::int64_t cents = whole * 100 + frac;
  return Money(negative ? -cents : cents);
}

std::string Money::to_string() const {
  const std::int64_t magnitude = cents_ < 0 ? -cents_ : cents_;
  char buf[32];
  std::snprintf(buf, sizeof buf, "%s%lld.%02lld", cents_ < 0 ? "-" : "",
                static_cast<long long>(magnitude / 100),
                static_cast<long long>(magnitude % 100));
  return buf;
}

}  // namespace promocast
