#include "promocast/promo_parser.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <regex>

#include "promocast/error.hpp"

namespace promocast {
namespace {

constexpr const char* kNum = R"((\d+(?:\.\d+)?))";
constexpr const char* kCur = R"((?:\$|cny|rmb)?)";

std::string amount() {
  return std::string(kCur) + R"(\s*)" + kNum + R"(\s*)" + kCur;
}

struct Grammar {
  PromotionKind kind;
  std::regex pattern;
};

const std::vector<Grammar>& grammars() {
  static const std::vector<Grammar> kGrammars = [] {
    const auto flags = std::regex::icase | std::regex::ECMAScript;
    std::vector<Grammar> g;
    g.push_back({PromotionKind::ValueDiscount,
                 std::regex("^" + amount() + R"( off (?:orders? )?over )" +
                                amount() + "$",
                            flags)});
    g.push_back({PromotionKind::FlashSale,
                 std::regex(std::string("^") + kNum +
                                R"( ?% off in )" + kNum + R"( hours?$)",
                            flags)});
    g.push_back({PromotionKind::PercentageDiscount,
                 std::regex(std::string("^") + kNum + R"( ?% off$)", flags)});
    g.push_back({PromotionKind::LoyaltyPoints,
                 std::regex(std::string("^") + kNum +
                                R"( loyalty points? back$)",
                            flags)});
    g.push_back({PromotionKind::FreeShipping,
                 std::regex(R"(^free shipping(?: on (?:orders? )?over )" +
                                amount() + ")?$",
                            flags)});
    g.push_back({PromotionKind::InterestFreeInstallment,
                 std::regex(std::string("^") + kNum +
                                R"( months? interest[- ]?free installments?$)",
                            flags)});
    return g;
  }();
  return kGrammars;
}

// Trims and collapses whitespace runs to one space.
std::string normalize(std::string_view text) {
  std::string out;
  bool pending_space = false;
  for (char c : text) {
    if (std::isspace(static_cast<unsigned char>(c))) {
      pending_space = !out.empty();
      continue;
    }
    if (pending_space) out.push_back(' ');
    pending_space = false;
    out.push_back(c);
  }
  return out;
}

double to_number(const std::string& text) {
  double value = 0.0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size()) {
    throw UnrecognizedPromotion("invalid number '" + text + "'");
  }
  return value;
}

Money to_money(const std::string& text) {
  try {
    return Money::parse(text);
  } catch (const ParseError&) {
    throw UnrecognizedPromotion("invalid amount '" + text + "'");
  }
}

std::string format_number(double value) {
  char buf[400];
  // Shortest representation that reads back to the same double.
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, value, std::chars_format::fixed);
  return std::string(buf, ptr);
}

// Shortest percentage text p with p / 100 == k_d, so render and parse agree.
std::string format_percent(double k_d) {
  char buf[64];
  for (int decimals = 0; decimals <= 15; ++decimals) {
    std::snprintf(buf, sizeof buf, "%.*f", decimals, k_d * 100.0);
    double back = 0.0;
    std::from_chars(buf, buf + std::strlen(buf), back);
    if (back / 100.0 == k_d) return buf;
  }
  return format_number(k_d * 100.0);
}

std::string format_money(Money m) {
  if (m.cents() % 100 == 0) return std::to_string(m.cents() / 100);
  return m.to_string();
}

}  // namespace

ParsedPromotion parse_promotion(std::string_view raw_text) {
  const std::string text = normalize(raw_text);
  if (text.empty()) throw UnrecognizedPromotion("empty promotion text");

  for (const Grammar& g : grammars()) {
    std::smatch m;
    if (!std::regex_match(text, m, g.pattern)) continue;

    ParsedPromotion out;
    out.kind = g.kind;
    switch (g.kind) {
      case PromotionKind::ValueDiscount: {
        out.amount_off = to_money(m[1].str());
        out.p_t = to_money(m[2].str());
        if (out.amount_off <= Money() || out.p_t <= Money()) {
          throw UnrecognizedPromotion("value discount needs positive amounts: '" +
                                      text + "'");
        }
        if (out.amount_off > out.p_t) {
          throw UnrecognizedPromotion("discount exceeds trigger amount: '" +
                                      text + "'");
        }
        out.k_d = out.amount_off.to_double() / out.p_t.to_double();
        break;
      }
      case PromotionKind::PercentageDiscount:
      case PromotionKind::FlashSale: {
        const double percent = to_number(m[1].str());
        if (!(percent > 0.0) || percent > 100.0) {
          throw UnrecognizedPromotion("percentage outside (0, 100]: '" + text +
                                      "'");
        }
        out.k_d = percent / 100.0;
        if (g.kind == PromotionKind::FlashSale) {
          out.flash_hours = to_number(m[2].str());
          if (!(out.flash_hours > 0.0)) {
            throw UnrecognizedPromotion("flash sale needs positive hours: '" +
                                        text + "'");
          }
        }
        break;
      }
      case PromotionKind::LoyaltyPoints:
      case PromotionKind::InterestFreeInstallment: {
        out.reward = to_number(m[1].str());
        if (!(out.reward > 0.0)) {
          throw UnrecognizedPromotion("reward must be positive: '" + text + "'");
        }
        break;
      }
      case PromotionKind::FreeShipping: {
        out.reward = 1.0;
        if (m[1].matched) out.p_t = to_money(m[1].str());
        break;
      }
    }
    return out;
  }
  throw UnrecognizedPromotion("unrecognized promotion '" + text + "'");
}

std::string render_promotion(const ParsedPromotion& p) {
  switch (p.kind) {
    case PromotionKind::ValueDiscount:
      return "$" + format_money(p.amount_off) + " Off Orders Over $" +
             format_money(p.p_t);
    case PromotionKind::PercentageDiscount:
      return format_percent(p.k_d) + "% Off";
    case PromotionKind::FlashSale:
      return format_percent(p.k_d) + "% Off in " +
             format_number(p.flash_hours) + " Hours";
    case PromotionKind::LoyaltyPoints:
      return format_number(p.reward) + " Loyalty Points Back";
    case PromotionKind::FreeShipping:
      if (p.p_t == Money()) return "Free Shipping";
      return "Free Shipping on Orders Over $" + format_money(p.p_t);
    case PromotionKind::InterestFreeInstallment:
      return format_number(p.reward) + " Months Interest-free Installment";
  }
  return {};
}

PromotionRecord make_promotion(std::string id, std::string product_id,
                               std::string raw_text, Date start, Date end,
                               bool enabled) {
  const ParsedPromotion parsed = parse_promotion(raw_text);
  PromotionRecord r;
  r.id = std::move(id);
  r.product_id = std::move(product_id);
  r.raw_text = std::move(raw_text);
  r.kind = parsed.kind;
  r.k_d = parsed.k_d;
  r.p_t = parsed.p_t;
  r.reward = parsed.reward;
  r.flash_hours = parsed.flash_hours;
  r.start = start;
  r.end = end;
  r.enabled = enabled;
  return r;
}

std::string_view to_string(LifecycleStatus status) {
  switch (status) {
    case LifecycleStatus::None: return "None";
    case LifecycleStatus::Pre: return "Pre";
    case LifecycleStatus::Active: return "Active";
    case LifecycleStatus::Post: return "Post";
  }
  return "?";
}

LifecycleStatus lifecycle_status(const PromotionRecord& promotion, Date day,
                                 int window_days) {
  if (window_days < 0) throw InvalidArgument("window_days must be >= 0");
  if (!promotion.enabled) return LifecycleStatus::None;
  if (promotion.start <= day && day <= promotion.end) return LifecycleStatus::Active;
  if (promotion.start - window_days <= day && day < promotion.start) {
    return LifecycleStatus::Pre;
  }
  if (promotion.end < day && day <= promotion.end + window_days) {
    return LifecycleStatus::Post;
  }
  return LifecycleStatus::None;
}

double promotion_value(const PromotionRecord& promotion, double base_price,
                       const RewardRates& rates) {
  if (!(base_price > 0.0)) throw InvalidArgument("base_price must be positive");
  switch (promotion.kind) {
    case PromotionKind::ValueDiscount:
    case PromotionKind::PercentageDiscount:
    case PromotionKind::FlashSale:
      return promotion.k_d;
    case PromotionKind::LoyaltyPoints:
      return promotion.reward * rates.currency_per_point / base_price;
    case PromotionKind::FreeShipping:
      return promotion.reward * rates.shipping_value / base_price;
    case PromotionKind::InterestFreeInstallment:
      // months * (rate * price) / price
      return promotion.reward * rates.monthly_financing;
  }
  return 0.0;
}

double promotion_strength(std::span<const PromotionRecord> promotions, Date day,
                          double base_price, const RewardRates& rates) {
  if (!(base_price > 0.0)) throw InvalidArgument("base_price must be positive");
  double total = 0.0;
  for (const PromotionRecord& p : promotions) {
    if (lifecycle_status(p, day) == LifecycleStatus::Active) {
      total += promotion_value(p, base_price, rates);
    }
  }
  return total;
}

}  // namespace promocast
