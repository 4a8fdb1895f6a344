#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>

#include "promocast/domain.hpp"

namespace promocast {

// Numeric content of one promotion text. Exactly the fields relevant to
// `kind` are nonzero.
struct ParsedPromotion {
  PromotionKind kind = PromotionKind::PercentageDiscount;
  double k_d = 0.0;
  Money p_t;
  double reward = 0.0;
  double flash_hours = 0.0;
  Money amount_off;  // ValueDiscount only

  bool operator==(const ParsedPromotion&) const = default;
};

// Recognizes the six promotion grammars (see docs/promotion_grammar.md).
// Case-insensitive; "$", "CNY" and "RMB" are accepted as currency markers.
// Throws UnrecognizedPromotion for anything else, including discounts that
// would exceed 100%.
ParsedPromotion parse_promotion(std::string_view raw_text);

// Canonical surface form, e.g. "$10 Off Orders Over $69". Inverse of
// parse_promotion up to whitespace and currency-marker choice.
std::string render_promotion(const ParsedPromotion& promotion);

// Builds a record from raw text; throws UnrecognizedPromotion.
PromotionRecord make_promotion(std::string id, std::string product_id,
                               std::string raw_text, Date start, Date end,
                               bool enabled = true);

enum class LifecycleStatus : std::uint8_t { None = 0, Pre = 1, Active = 2, Post = 3 };

std::string_view to_string(LifecycleStatus status);

inline constexpr int kDefaultLifecycleWindow = 3;

LifecycleStatus lifecycle_status(const PromotionRecord& promotion, Date day,
                                 int window_days = kDefaultLifecycleWindow);

// Conversion of indirect rewards into a fraction of the base price.
struct RewardRates {
  double currency_per_point = 0.01;
  double shipping_value = 8.0;
  // Fraction of the price that one interest-free month is worth.
  double monthly_financing = 0.005;
};

// k_d for direct kinds; the converted reward over base_price for indirect
// kinds. base_price must be positive.
double promotion_value(const PromotionRecord& promotion, double base_price,
                       const RewardRates& rates = {});

// Sum of promotion_value over promotions that are Active on `day`.
double promotion_strength(std::span<const PromotionRecord> promotions, Date day,
                          double base_price, const RewardRates& rates = {});

}  // namespace promocast
