#include "promocast/domain.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <unordered_set>

#include "promocast/error.hpp"

namespace promocast {

std::optional<std::size_t> SalesSeries::index_of(Date date) const {
  auto it = std::lower_bound(
      days.begin(), days.end(), date,
      [](const SalesDay& d, Date value) { return d.date < value; });
  if (it == days.end() || it->date != date) return std::nullopt;
  return static_cast<std::size_t>(it - days.begin());
}

std::size_t SalesSeries::count_before(Date date) const {
  auto it = std::lower_bound(
      days.begin(), days.end(), date,
      [](const SalesDay& d, Date value) { return d.date < value; });
  return static_cast<std::size_t>(it - days.begin());
}

std::string_view to_string(PromotionKind kind) {
  switch (kind) {
    case PromotionKind::ValueDiscount: return "ValueDiscount";
    case PromotionKind::PercentageDiscount: return "PercentageDiscount";
    case PromotionKind::FlashSale: return "FlashSale";
    case PromotionKind::LoyaltyPoints: return "LoyaltyPoints";
    case PromotionKind::FreeShipping: return "FreeShipping";
    case PromotionKind::InterestFreeInstallment: return "InterestFreeInstallment";
  }
  return "?";
}

PromotionKind promotion_kind_from_string(std::string_view name) {
  for (PromotionKind kind : kAllPromotionKinds) {
    if (to_string(kind) == name) return kind;
  }
  throw InvalidArgument("unknown promotion kind '" + std::string(name) + "'");
}

std::string_view to_string(ModelKind kind) {
  switch (kind) {
    case ModelKind::RandomForest: return "RandomForest";
    case ModelKind::GradientBoosting: return "GradientBoosting";
    case ModelKind::MLP: return "MLP";
    case ModelKind::Linear: return "Linear";
  }
  return "?";
}

ModelKind model_kind_from_string(std::string_view name) {
  for (ModelKind kind : {ModelKind::RandomForest, ModelKind::GradientBoosting,
                         ModelKind::MLP, ModelKind::Linear}) {
    if (to_string(kind) == name) return kind;
  }
  throw InvalidArgument("unknown model kind '" + std::string(name) + "'");
}

std::string_view to_string(FeatureGroup group) {
  switch (group) {
    case FeatureGroup::Descriptions: return "descriptions";
    case FeatureGroup::Price: return "price";
    case FeatureGroup::Temporal: return "temporal";
    case FeatureGroup::Competitive: return "competitive";
    case FeatureGroup::Promotion: return "promotion";
  }
  return "?";
}

void check_group_map(const GroupMap& map, std::size_t dim) {
  std::vector<char> seen(dim, 0);
  std::size_t total = 0;
  for (std::size_t g = 0; g < kGroupCount; ++g) {
    if (map[g].empty()) {
      throw InvalidArgument("feature group '" +
                            std::string(to_string(kAllGroups[g])) +
                            "' is empty");
    }
    for (std::size_t idx : map[g]) {
      if (idx >= dim) throw InvalidArgument("group slot out of range");
      if (seen[idx]) throw InvalidArgument("feature groups overlap");
      seen[idx] = 1;
      ++total;
    }
  }
  if (total != dim) throw InvalidArgument("feature groups do not cover all slots");
}

const Product* Dataset::find_product(std::string_view id) const {
  for (const Product& p : products) {
    if (p.id == id) return &p;
  }
  return nullptr;
}

const SalesSeries* Dataset::find_series(std::string_view product_id) const {
  for (const SalesSeries& s : sales) {
    if (s.product_id == product_id) return &s;
  }
  return nullptr;
}

std::vector<PromotionRecord> Dataset::promotions_for(
    std::string_view product_id) const {
  std::vector<PromotionRecord> out;
  for (const PromotionRecord& p : promotions) {
    if (p.product_id == product_id) out.push_back(p);
  }
  return out;
}

std::optional<std::pair<Date, Date>> Dataset::span() const {
  std::optional<std::pair<Date, Date>> out;
  for (const SalesSeries& s : sales) {
    if (s.days.empty()) continue;
    const Date first = s.days.front().date;
    const Date last = s.days.back().date;
    if (!out) {
      out.emplace(first, last);
    } else {
      out->first = std::min(out->first, first);
      out->second = std::max(out->second, last);
    }
  }
  return out;
}

ValidationReport validate_dataset(const std::vector<Product>& products,
                                  const std::vector<SalesSeries>& sales,
                                  const std::vector<PromotionRecord>& promotions) {
  ValidationReport report;
  auto add = [&](std::string locator, std::string rule, std::string message) {
    report.violations.push_back(
        {std::move(locator), std::move(rule), std::move(message)});
  };

  if (products.empty()) add("products", "no_products", "no products");

  std::set<std::string> product_ids;
  for (std::size_t i = 0; i < products.size(); ++i) {
    const Product& p = products[i];
    const std::string loc = "products[" + std::to_string(i) + "]";
    if (p.id.empty()) add(loc, "empty_id", "empty product id");
    if (!p.id.empty() && !product_ids.insert(p.id).second) {
      add(loc + ":id=" + p.id, "duplicate_id", "duplicate id '" + p.id + "'");
    }
    if (p.base_price < Money()) {
      add(loc + ":id=" + p.id, "negative_base_price", "negative base price");
    }
  }

  std::set<std::string> series_ids;
  for (const SalesSeries& s : sales) {
    const std::string loc = "sales:product=" + s.product_id;
    if (!product_ids.count(s.product_id)) {
      add(loc, "unknown_product", "sales for unknown product '" + s.product_id + "'");
    }
    if (!series_ids.insert(s.product_id).second) {
      add(loc, "duplicate_series", "more than one sales series for product");
    }
    for (std::size_t i = 0; i < s.days.size(); ++i) {
      const SalesDay& d = s.days[i];
      const std::string day_loc = loc + ",date=" + d.date.to_string();
      if (i > 0) {
        if (d.date == s.days[i - 1].date) {
          add(day_loc, "duplicate_date", "duplicate date");
        } else if (d.date < s.days[i - 1].date) {
          add(day_loc, "dates_not_increasing", "dates not strictly increasing");
        }
      }
      if (d.units_sold < 0) add(day_loc, "negative_sales", "negative sales");
      if (d.price < Money()) add(day_loc, "negative_price", "negative price");
    }
  }

  std::unordered_set<std::string> promo_ids;
  for (const PromotionRecord& p : promotions) {
    const std::string loc = "promotions:id=" + p.id;
    if (p.id.empty()) add(loc, "empty_id", "empty promotion id");
    if (!p.id.empty() && !promo_ids.insert(p.id).second) {
      add(loc, "duplicate_id", "duplicate id '" + p.id + "'");
    }
    if (!product_ids.count(p.product_id)) {
      add(loc, "unknown_product",
          "promotion for unknown product '" + p.product_id + "'");
    }
    if (p.start > p.end) add(loc, "start_after_end", "start after end");
    if (!(p.k_d >= 0.0 && p.k_d <= 1.0)) {
      add(loc, "k_d_out_of_range", "discount rate outside [0, 1]");
    }
    if (p.p_t < Money()) add(loc, "negative_trigger", "negative trigger amount");
    const bool has_discount = p.k_d > 0.0;
    const bool has_reward = p.reward > 0.0;
    if (is_direct(p.kind) ? (!has_discount || has_reward)
                          : (!has_reward || has_discount)) {
      add(loc, "kind_fields",
          std::string(to_string(p.kind)) +
              (is_direct(p.kind) ? " requires k_d > 0 and no reward"
                                 : " requires reward > 0 and k_d = 0"));
    }
  }

  report.ok = report.violations.empty();
  return report;
}

}  // namespace promocast
