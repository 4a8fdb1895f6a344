#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "promocast/domain.hpp"
#include "promocast/promo_parser.hpp"

namespace promocast {

// Lowercased word tokens of a title. Separators are whitespace and ASCII
// punctuation; bytes >= 0x80 are kept as word characters.
std::vector<std::string> tokenize_title(std::string_view title);

class Codebook {
 public:
  Codebook() = default;
  explicit Codebook(std::vector<std::string> words);

  const std::vector<std::string>& words() const { return words_; }
  std::size_t size() const { return words_.size(); }
  // -1 when absent.
  std::ptrdiff_t index_of(std::string_view word) const;

  bool operator==(const Codebook& other) const { return words_ == other.words_; }

 private:
  std::vector<std::string> words_;
  std::unordered_map<std::string, std::size_t> index_;
};

// Union of title tokens in first-appearance order. Throws InvalidArgument
// when no title contributes a token.
Codebook build_codebook(std::span<const std::string> titles);

// Bag-of-words membership vector over the codebook.
std::vector<std::uint8_t> encode_title(std::string_view title,
                                       const Codebook& codebook);

inline constexpr std::size_t kTitleDim = 8;
using TitleEmbedding = std::array<double, kTitleDim>;

// Seeded Gaussian random projection from the bag-of-words space to 8 dims.
class TitleEmbedder {
 public:
  TitleEmbedder() = default;
  TitleEmbedder(const Codebook& codebook, std::uint64_t seed);

  std::size_t input_dim() const { return input_dim_; }
  std::uint64_t seed() const { return seed_; }
  // Row-major input_dim x 8.
  const std::vector<double>& projection() const { return projection_; }

  // Throws InvalidArgument on a length mismatch.
  TitleEmbedding embed(std::span<const std::uint8_t> bag) const;

 private:
  std::size_t input_dim_ = 0;
  std::uint64_t seed_ = 0;
  std::vector<double> projection_;
};

inline TitleEmbedding embed_title(std::span<const std::uint8_t> bag,
                                  const TitleEmbedder& embedder) {
  return embedder.embed(bag);
}

inline constexpr std::array<std::size_t, 4> kHistoryWindows = {30, 90, 182, 365};

struct HistoricalAverages {
  double avg_30 = 0.0;
  double avg_90 = 0.0;
  double avg_182 = 0.0;
  double avg_365 = 0.0;

  bool operator==(const HistoricalAverages&) const = default;
};

// Means over the last 30/90/182/365 observations strictly before `day`;
// shorter histories average whatever is available. Throws
// InsufficientHistory when nothing precedes `day`.
HistoricalAverages historical_averages(const SalesSeries& series, Date day);
// Same rule over an explicit history (oldest first).
HistoricalAverages historical_averages(std::span<const double> prior_units);

struct SlotInfo {
  std::string name;
  FeatureGroup group;
  std::string unit;
};

// Slot table of the model input. Exported as JSON so the explainer and any
// client agree on which slot belongs to which group.
class FeatureLayout {
 public:
  static const FeatureLayout& standard();

  const std::vector<SlotInfo>& slots() const { return slots_; }
  std::size_t size() const { return slots_.size(); }
  const GroupMap& group_map() const { return group_map_; }
  std::uint64_t fingerprint() const { return fingerprint_; }
  // Throws NotFound.
  std::size_t index_of(std::string_view name) const;

  // Offsets of the fixed blocks.
  static constexpr std::size_t kTitle = 0;
  static constexpr std::size_t kPrice = 8;
  static constexpr std::size_t kPriceRatio = 9;
  static constexpr std::size_t kWeekday = 10;
  static constexpr std::size_t kMonth = 17;
  static constexpr std::size_t kAverages = 29;
  static constexpr std::size_t kCompetitorPrice = 33;
  static constexpr std::size_t kCompetitorSales = 34;
  static constexpr std::size_t kPromotion = 35;  // 3 slots per kind
  static constexpr std::size_t kPromotionStrength = 53;
  static constexpr std::size_t kSize = 54;

  static constexpr std::size_t status_slot(PromotionKind kind) {
    return kPromotion + 3 * static_cast<std::size_t>(kind);
  }
  static constexpr std::size_t value_slot(PromotionKind kind) {
    return status_slot(kind) + 1;
  }
  static constexpr std::size_t trigger_slot(PromotionKind kind) {
    return status_slot(kind) + 2;
  }

 private:
  FeatureLayout();

  std::vector<SlotInfo> slots_;
  GroupMap group_map_;
  std::uint64_t fingerprint_ = 0;
};

struct FeatureOptions {
  int lifecycle_window = kDefaultLifecycleWindow;
  RewardRates rates;
};

// Competitor signals for one day.
struct CompetitorSnapshot {
  double mean_price = 0.0;
  double mean_recent_sales = 0.0;  // trailing 7 observations, before the day
};

// Snapshot over the given competitor series; zeros when there are none.
CompetitorSnapshot competitor_snapshot(
    std::span<const SalesSeries* const> competitors, Date day);

// Price on `day`: the record's price, else the latest earlier price, else
// `fallback`.
double price_on(const SalesSeries& series, Date day, double fallback);

// Lowest-level assembly from explicit per-day inputs; used by recursive
// forecasting where history includes predicted values.
FeatureVector assemble_features(const Product& product, Date day, double price,
                                std::span<const double> prior_units,
                                std::span<const PromotionRecord> promotions,
                                const CompetitorSnapshot& competitors,
                                const TitleEmbedder& embedder,
                                const Codebook& codebook,
                                const FeatureOptions& options = {});

FeatureVector assemble_features(const Product& product, Date day,
                                const SalesSeries& sales,
                                std::span<const PromotionRecord> promotions,
                                std::span<const SalesSeries* const> competitors,
                                const TitleEmbedder& embedder,
                                const Codebook& codebook,
                                const FeatureOptions& options = {});

}  // namespace promocast
