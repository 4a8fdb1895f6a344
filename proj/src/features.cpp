#include "promocast/features.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>

#include "promocast/error.hpp"
#include "promocast/hash.hpp"
#include "promocast/rng.hpp"

namespace promocast {

std::vector<std::string> tokenize_title(std::string_view title) {
  std::vector<std::string> tokens;
  std::string current;
  for (char ch : title) {
    const auto c = static_cast<unsigned char>(ch);
    if (c >= 0x80 || std::isalnum(c)) {
      current.push_back(static_cast<char>(c < 0x80 ? std::tolower(c) : c));
    } else if (!current.empty()) {
      tokens.push_back(std::move(current));
      current.clear();
    }
  }
  if (!current.empty()) tokens.push_back(std::move(current));
  return tokens;
}

Codebook::Codebook(std::vector<std::string> words) : words_(std::move(words)) {
  for (std::size_t i = 0; i < words_.size(); ++i) {
    if (words_[i].empty()) throw InvalidArgument("empty codebook word");
    if (!index_.emplace(words_[i], i).second) {
      throw InvalidArgument("duplicate codebook word '" + words_[i] + "'");
    }
  }
}

std::ptrdiff_t Codebook::index_of(std::string_view word) const {
  auto it = index_.find(std::string(word));
  return it == index_.end() ? -1 : static_cast<std::ptrdiff_t>(it->second);
}

Codebook build_codebook(std::span<const std::string> titles) {
  std::vector<std::string> words;
  std::unordered_map<std::string, bool> seen;
  for (const std::string& title : titles) {
    for (std::string& token : tokenize_title(title)) {
      if (seen.emplace(token, true).second) words.push_back(std::move(token));
    }
  }
  if (words.empty()) throw InvalidArgument("all titles are empty");
  return Codebook(std::move(words));
}

std::vector<std::uint8_t> encode_title(std::string_view title,
                                       const Codebook& codebook) {
  std::vector<std::uint8_t> bag(codebook.size(), 0);
  for (const std::string& token : tokenize_title(title)) {
    const std::ptrdiff_t idx = codebook.index_of(token);
    if (idx >= 0) bag[static_cast<std::size_t>(idx)] = 1;
  }
  return bag;
}

TitleEmbedder::TitleEmbedder(const Codebook& codebook, std::uint64_t seed)
    : input_dim_(codebook.size()), seed_(seed) {
  if (input_dim_ == 0) throw InvalidArgument("codebook is empty");
  Rng rng(seed);
  const double scale = 1.0 / std::sqrt(static_cast<double>(kTitleDim));
  projection_.resize(input_dim_ * kTitleDim);
  for (double& w : projection_) w = rng.normal() * scale;
}

TitleEmbedding TitleEmbedder::embed(std::span<const std::uint8_t> bag) const {
  if (bag.size() != input_dim_) {
    throw InvalidArgument("title vector has length " + std::to_string(bag.size()) +
                          ", embedder expects " + std::to_string(input_dim_));
  }
  TitleEmbedding out{};
  for (std::size_t i = 0; i < input_dim_; ++i) {
    if (!bag[i]) continue;
    for (std::size_t j = 0; j < kTitleDim; ++j) {
      out[j] += static_cast<double>(bag[i]) * projection_[i * kTitleDim + j];
    }
  }
  return out;
}

HistoricalAverages historical_averages(std::span<const double> prior_units) {
  if (prior_units.empty()) {
    throw InsufficientHistory("no sales history before the requested day");
  }
  std::array<double, kHistoryWindows.size()> means{};
  double sum = 0.0;
  std::size_t taken = 0;
  const std::size_t n = prior_units.size();
  for (std::size_t w = 0; w < kHistoryWindows.size(); ++w) {
    const std::size_t want = std::min(kHistoryWindows[w], n);
    for (; taken < want; ++taken) sum += prior_units[n - 1 - taken];
    means[w] = sum / static_cast<double>(want);
  }
  return {means[0], means[1], means[2], means[3]};
}

HistoricalAverages historical_averages(const SalesSeries& series, Date day) {
  const std::size_t n = series.count_before(day);
  if (n == 0) {
    throw InsufficientHistory("no sales history for '" + series.product_id +
                              "' before " + day.to_string());
  }
  const std::size_t first = n > kHistoryWindows.back() ? n - kHistoryWindows.back() : 0;
  std::vector<double> units;
  units.reserve(n - first);
  for (std::size_t i = first; i < n; ++i) {
    units.push_back(static_cast<double>(series.days[i].units_sold));
  }
  return historical_averages(units);
}

const FeatureLayout& FeatureLayout::standard() {
  static const FeatureLayout kLayout;
  return kLayout;
}

FeatureLayout::FeatureLayout() {
  auto add = [&](std::string name, FeatureGroup group, std::string unit) {
    group_map_[static_cast<std::size_t>(group)].push_back(slots_.size());
    slots_.push_back({std::move(name), group, std::move(unit)});
  };
  for (std::size_t i = 0; i < kTitleDim; ++i) {
    add("title_" + std::to_string(i), FeatureGroup::Descriptions, "embedding");
  }
  add("price", FeatureGroup::Price, "currency");
  add("price_ratio", FeatureGroup::Price, "price/base_price");
  static constexpr const char* kDays[] = {"mon", "tue", "wed", "thu",
                                          "fri", "sat", "sun"};
  for (const char* d : kDays) add(std::string("weekday_") + d, FeatureGroup::Temporal, "one-hot");
  static constexpr const char* kMonths[] = {"jan", "feb", "mar", "apr",
                                            "may", "jun", "jul", "aug",
                                            "sep", "oct", "nov", "dec"};
  for (const char* m : kMonths) add(std::string("month_") + m, FeatureGroup::Temporal, "one-hot");
  for (std::size_t w : kHistoryWindows) {
    add("avg_" + std::to_string(w), FeatureGroup::Temporal, "units/day");
  }
  add("competitor_mean_price", FeatureGroup::Competitive, "currency");
  add("competitor_mean_sales_7", FeatureGroup::Competitive, "units/day");
  for (PromotionKind kind : kAllPromotionKinds) {
    const std::string base(to_string(kind));
    add(base + "_status", FeatureGroup::Promotion, "ordinal 0..3");
    add(base + "_value", FeatureGroup::Promotion,
        is_direct(kind) ? "k_d" : "reward/base_price");
    add(base + "_trigger", FeatureGroup::Promotion, "p_t/base_price");
  }
  add("promotion_strength", FeatureGroup::Promotion, "fraction");

  if (slots_.size() != kSize) throw Error("feature layout size drifted");
  check_group_map(group_map_, slots_.size());

  Fnv1a h;
  for (const SlotInfo& s : slots_) {
    h.update(s.name).update("|").update(to_string(s.group)).update("|").update(s.unit).update(";");
  }
  fingerprint_ = h.digest();
}

std::size_t FeatureLayout::index_of(std::string_view name) const {
  for (std::size_t i = 0; i < slots_.size(); ++i) {
    if (slots_[i].name == name) return i;
  }
  throw NotFound("no feature slot named '" + std::string(name) + "'");
}

double price_on(const SalesSeries& series, Date day, double fallback) {
  const std::size_t n = series.count_before(day + 1);
  if (n == 0) return fallback;
  return series.days[n - 1].price.to_double();
}

CompetitorSnapshot competitor_snapshot(
    std::span<const SalesSeries* const> competitors, Date day) {
  CompetitorSnapshot snap;
  if (competitors.empty()) return snap;
  for (const SalesSeries* s : competitors) {
    const double first_price = s->days.empty() ? 0.0 : s->days.front().price.to_double();
    snap.mean_price += price_on(*s, day, first_price);
    const std::size_t n = s->count_before(day);
    const std::size_t k = std::min<std::size_t>(7, n);
    double sum = 0.0;
    for (std::size_t i = n - k; i < n; ++i) {
      sum += static_cast<double>(s->days[i].units_sold);
    }
    snap.mean_recent_sales += k ? sum / static_cast<double>(k) : 0.0;
  }
  const auto count = static_cast<double>(competitors.size());
  snap.mean_price /= count;
  snap.mean_recent_sales /= count;
  return snap;
}

FeatureVector assemble_features(const Product& product, Date day, double price,
                                std::span<const double> prior_units,
                                std::span<const PromotionRecord> promotions,
                                const CompetitorSnapshot& competitors,
                                const TitleEmbedder& embedder,
                                const Codebook& codebook,
                                const FeatureOptions& options) {
  using L = FeatureLayout;
  const FeatureLayout& layout = L::standard();
  const double base_price = product.base_price.to_double();
  if (!(base_price > 0.0)) {
    throw InvalidArgument("product '" + product.id + "' has no positive base price");
  }
  const HistoricalAverages averages = historical_averages(prior_units);

  FeatureVector fv;
  fv.values.assign(L::kSize, 0.0);
  fv.group_map = layout.group_map();
  fv.layout_fingerprint = layout.fingerprint();
  auto& v = fv.values;

  const TitleEmbedding title = embedder.embed(encode_title(product.title, codebook));
  std::copy(title.begin(), title.end(), v.begin() + L::kTitle);

  v[L::kPrice] = price;
  v[L::kPriceRatio] = price / base_price;

  v[L::kWeekday + day.weekday()] = 1.0;
  v[L::kMonth + day.month() - 1] = 1.0;
  v[L::kAverages + 0] = averages.avg_30;
  v[L::kAverages + 1] = averages.avg_90;
  v[L::kAverages + 2] = averages.avg_182;
  v[L::kAverages + 3] = averages.avg_365;

  v[L::kCompetitorPrice] = competitors.mean_price;
  v[L::kCompetitorSales] = competitors.mean_recent_sales;

  // Per kind: the governing status is the highest-priority one among that
  // kind's promotions (Active, then Pre, then Post); value and trigger come
  // from the promotions sharing it.
  auto priority = [](LifecycleStatus s) {
    switch (s) {
      case LifecycleStatus::Active: return 3;
      case LifecycleStatus::Pre: return 2;
      case LifecycleStatus::Post: return 1;
      case LifecycleStatus::None: return 0;
    }
    return 0;
  };
  for (PromotionKind kind : kAllPromotionKinds) {
    LifecycleStatus governing = LifecycleStatus::None;
    for (const PromotionRecord& p : promotions) {
      if (p.kind != kind) continue;
      const LifecycleStatus s = lifecycle_status(p, day, options.lifecycle_window);
      if (priority(s) > priority(governing)) governing = s;
    }
    if (governing == LifecycleStatus::None) continue;
    double value = 0.0;
    double trigger = 0.0;
    for (const PromotionRecord& p : promotions) {
      if (p.kind != kind ||
          lifecycle_status(p, day, options.lifecycle_window) != governing) {
        continue;
      }
      value += promotion_value(p, base_price, options.rates);
      trigger = std::max(trigger, p.p_t.to_double() / base_price);
    }
    v[L::status_slot(kind)] = static_cast<double>(governing);
    v[L::value_slot(kind)] = value;
    v[L::trigger_slot(kind)] = trigger;
  }
  v[L::kPromotionStrength] =
      promotion_strength(promotions, day, base_price, options.rates);
  return fv;
}

FeatureVector assemble_features(const Product& product, Date day,
                                const SalesSeries& sales,
                                std::span<const PromotionRecord> promotions,
                                std::span<const SalesSeries* const> competitors,
                                const TitleEmbedder& embedder,
                                const Codebook& codebook,
                                const FeatureOptions& options) {
  const std::size_t n = sales.count_before(day);
  const std::size_t first = n > kHistoryWindows.back() ? n - kHistoryWindows.back() : 0;
  std::vector<double> prior;
  prior.reserve(n - first);
  for (std::size_t i = first; i < n; ++i) {
    prior.push_back(static_cast<double>(sales.days[i].units_sold));
  }
  const double price = price_on(sales, day, product.base_price.to_double());
  return assemble_features(product, day, price, prior, promotions,
                           competitor_snapshot(competitors, day), embedder,
                           codebook, options);
}

}  // namespace promocast
