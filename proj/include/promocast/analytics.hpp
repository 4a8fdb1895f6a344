#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "promocast/domain.hpp"
#include "promocast/matrix.hpp"
#include "promocast/promo_parser.hpp"

namespace promocast {

// Linear interpolation between order statistics (q in [0, 1]).
double quantile(std::span<const double> values, double q);

struct ProductStats {
  double median = 0.0;
  double std = 0.0;
  double iqr = 0.0;
  double corr_price = 0.0;
  double corr_promo = 0.0;
  double corr_season = 0.0;

  std::array<double, 6> as_array() const {
    return {median, std, iqr, corr_price, corr_promo, corr_season};
  }
};

inline constexpr std::size_t kMinStatsDays = 8;

// Pearson correlation; 0 when either side has zero variance.
double pearson(std::span<const double> a, std::span<const double> b);

// Summer-peaked seasonal carrier, cos(2*pi*(doy - 182)/365.25).
double season_signal(Date day);

// Throws InvalidArgument for fewer than kMinStatsDays days.
ProductStats product_stats(const SalesSeries& sales,
                           std::span<const PromotionRecord> promotions,
                           double base_price, const RewardRates& rates = {});

// clamp((v - median) / IQR, -2, 2) mapped onto [0, 1]; IQR 0 is treated as 1.
std::vector<double> robust_normalize(std::span<const double> values);

using StatsVector = std::array<double, 6>;

// Robust-normalizes median/std/iqr across products; correlations pass through.
std::vector<StatsVector> normalize_stats(std::span<const ProductStats> stats);

struct StatsEntry {
  std::string product_id;
  std::string category;
  StatsVector normalized{};
};

struct CompetitorList {
  std::vector<std::string> ids;
  std::vector<double> distances;
  bool short_list = false;  // fewer than k same-category candidates
};

// k nearest same-category products by Euclidean distance, ties by id.
CompetitorList top_competitors(const StatsEntry& target,
                               std::span<const StatsEntry> all, std::size_t k);

struct TsneOptions {
  double perplexity = 30.0;
  std::size_t iterations = 1000;
  double early_exaggeration = 12.0;
  std::size_t exaggeration_iterations = 250;
  double learning_rate = 200.0;
  std::uint64_t seed = 1;
};

struct Projection2D {
  std::vector<std::array<double, 2>> coords;
  std::uint64_t seed = 0;
  double perplexity = 0.0;
  bool pca_fallback = false;
  // KL(P || Q) at the initial layout and after optimization (t-SNE only).
  double initial_kl = 0.0;
  double final_kl = 0.0;
};

// Exact t-SNE over the rows of `points`; falls back to the first two
// principal components when rows < 3 * perplexity.
Projection2D project_products(const Matrix& points, const TsneOptions& options = {});

// Principal-component coordinates (first two components).
std::vector<std::array<double, 2>> pca_2d(const Matrix& points);

// (V_t - V_{t-1}) / V_{t-1} at `promo_start`. Throws InvalidArgument when
// either day is missing and UndefinedGrowth when V_{t-1} = 0.
double growth_rate(const SalesSeries& series, Date promo_start);
double growth_rate(double previous, double current);

// Mean daily sales per word, averaged over products whose title has it.
// Sorted by descending weight, then word.
std::vector<std::pair<std::string, double>> word_cloud_weights(
    std::span<const Product> products, std::span<const SalesSeries> sales);

}  // namespace promocast
