#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "promocast/date.hpp"
#include "promocast/money.hpp"

namespace promocast {

struct Product {
  std::string id;
  std::string title;
  std::string category;
  std::string brand;
  std::string store;
  Money base_price;

  bool operator==(const Product&) const = default;
};

struct SalesDay {
  Date date;
  std::int64_t units_sold = 0;
  Money price;

  bool operator==(const SalesDay&) const = default;
};

struct SalesSeries {
  std::string product_id;
  std::vector<SalesDay> days;  // sorted by date

  // Index of the record for `date`, if present.
  std::optional<std::size_t> index_of(Date date) const;
  // Number of records strictly before `date`.
  std::size_t count_before(Date date) const;

  bool operator==(const SalesSeries&) const = default;
};

enum class PromotionKind {
  ValueDiscount,
  PercentageDiscount,
  FlashSale,
  LoyaltyPoints,
  FreeShipping,
  InterestFreeInstallment,
};

inline constexpr std::size_t kPromotionKindCount = 6;
inline constexpr std::array<PromotionKind, kPromotionKindCount>
    kAllPromotionKinds = {
        PromotionKind::ValueDiscount,  PromotionKind::PercentageDiscount,
        PromotionKind::FlashSale,      PromotionKind::LoyaltyPoints,
        PromotionKind::FreeShipping,   PromotionKind::InterestFreeInstallment,
};

// Direct kinds reduce the paid price; indirect kinds grant a reward.
constexpr bool is_direct(PromotionKind kind) {
  return kind == PromotionKind::ValueDiscount ||
         kind == PromotionKind::PercentageDiscount ||
         kind == PromotionKind::FlashSale;
}

std::string_view to_string(PromotionKind kind);
PromotionKind promotion_kind_from_string(std::string_view name);

struct PromotionRecord {
  std::string id;
  std::string product_id;
  std::string raw_text;
  PromotionKind kind = PromotionKind::PercentageDiscount;
  double k_d = 0.0;        // fraction saved, direct kinds only
  Money p_t;               // trigger amount, zero if unconditional
  double reward = 0.0;     // points / months / 1 for free shipping
  double flash_hours = 0;  // FlashSale only
  Date start;
  Date end;
  bool enabled = true;

  bool operator==(const PromotionRecord&) const = default;
};

enum class ModelKind { RandomForest, GradientBoosting, MLP, Linear };

std::string_view to_string(ModelKind kind);
ModelKind model_kind_from_string(std::string_view name);

enum class FeatureGroup { Descriptions, Price, Temporal, Competitive, Promotion };

inline constexpr std::size_t kGroupCount = 5;
inline constexpr std::array<FeatureGroup, kGroupCount> kAllGroups = {
    FeatureGroup::Descriptions, FeatureGroup::Price, FeatureGroup::Temporal,
    FeatureGroup::Competitive, FeatureGroup::Promotion};

std::string_view to_string(FeatureGroup group);

using GroupAttribution = std::array<double, kGroupCount>;

// Slot indices of each group. A valid map partitions [0, dim) with no empty
// group.
using GroupMap = std::array<std::vector<std::size_t>, kGroupCount>;

// Throws InvalidArgument when `map` is not a partition of [0, dim).
void check_group_map(const GroupMap& map, std::size_t dim);

struct FeatureVector {
  std::vector<double> values;
  GroupMap group_map;
  std::uint64_t layout_fingerprint = 0;
};

struct ForecastResult {
  ModelKind model_kind = ModelKind::RandomForest;
  std::string product_id;
  std::vector<Date> horizon;
  std::vector<double> predictions;
  std::vector<GroupAttribution> attributions;
  // Same tuples scaled so that the absolute values sum to one.
  std::vector<GroupAttribution> normalized_attributions;
  double baseline = 0.0;
};

struct Violation {
  std::string locator;  // e.g. "sales.csv:product=p1,date=2021-01-03"
  std::string rule;     // stable machine-readable id
  std::string message;

  bool operator==(const Violation&) const = default;
};

struct ValidationReport {
  bool ok = true;
  std::vector<Violation> violations;

  bool operator==(const ValidationReport&) const = default;
};

struct Dataset {
  std::vector<Product> products;
  std::vector<SalesSeries> sales;
  std::vector<PromotionRecord> promotions;

  const Product* find_product(std::string_view id) const;
  const SalesSeries* find_series(std::string_view product_id) const;
  std::vector<PromotionRecord> promotions_for(std::string_view product_id) const;
  // First and last sales date across all series.
  std::optional<std::pair<Date, Date>> span() const;

  bool operator==(const Dataset&) const = default;
};

ValidationReport validate_dataset(const std::vector<Product>& products,
                                  const std::vector<SalesSeries>& sales,
                                  const std::vector<PromotionRecord>& promotions);

inline ValidationReport validate_dataset(const Dataset& dataset) {
  return validate_dataset(dataset.products, dataset.sales, dataset.promotions);
}

}  // namespace promocast
