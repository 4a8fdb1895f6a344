#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "promocast/analytics.hpp"
#include "promocast/domain.hpp"
#include "promocast/explain.hpp"
#include "promocast/features.hpp"
#include "promocast/matrix.hpp"
#include "promocast/models.hpp"

namespace promocast {

struct PipelineOptions {
  std::uint64_t embed_seed = 17;
  std::size_t competitors = 5;
  FeatureOptions features;
  std::size_t background_size = kDefaultBackgroundSize;
  std::uint64_t background_seed = 11;
  // Days a forecast may extend past the last observed sale.
  int horizon_cap = 90;
};

struct TrainingSet {
  Matrix X;
  std::vector<double> y;
  struct RowInfo {
    std::string product_id;
    Date date;
  };
  std::vector<RowInfo> rows;
};

// Everything derived from one immutable dataset that feature assembly needs:
// codebook, title embedder, product statistics and competitor lists.
class ForecastContext {
 public:
  explicit ForecastContext(Dataset dataset, PipelineOptions options = {});

  const Dataset& dataset() const { return dataset_; }
  const PipelineOptions& options() const { return options_; }
  const Codebook& codebook() const { return codebook_; }
  const TitleEmbedder& embedder() const { return embedder_; }
  std::uint64_t fingerprint() const { return fingerprint_; }

  // Products with at least kMinStatsDays of sales, in dataset order.
  const std::vector<StatsEntry>& stats_entries() const { return entries_; }
  const std::map<std::string, ProductStats>& stats() const { return stats_; }
  // Throws NotFound for unknown products.
  const CompetitorList& competitors(const std::string& product_id) const;

  const Product& product(const std::string& product_id) const;
  const SalesSeries& series(const std::string& product_id) const;

  // Feature row for an observed-history day with the given promotions.
  FeatureVector features(const std::string& product_id, Date day,
                         std::span<const PromotionRecord> promotions) const;
  FeatureVector features(const std::string& product_id, Date day) const;

  // One row per (product, observed day in [from, to]) with prior history.
  TrainingSet training_set(Date from, Date to) const;
  TrainingSet training_set() const;

  Background background(const TrainingSet& training) const;

  // Predictions and group attributions over [start, end]. Days past the
  // last observed sale feed predictions back into the trailing averages.
  // Throws InvalidArgument for horizons outside the allowed range and
  // LayoutMismatch for models trained on another layout.
  ForecastResult forecast(const TrainedModel& model, const Background& background,
                          const std::string& product_id, Date start, Date end,
                          std::span<const PromotionRecord> promotions) const;
  ForecastResult forecast(const TrainedModel& model, const Background& background,
                          const std::string& product_id, Date start, Date end) const;

  // Promotions of one product as stored in the dataset.
  std::vector<PromotionRecord> promotions(const std::string& product_id) const;

 private:
  std::vector<const SalesSeries*> competitor_series(const std::string& product_id) const;

  Dataset dataset_;
  PipelineOptions options_;
  Codebook codebook_;
  TitleEmbedder embedder_;
  std::uint64_t fingerprint_ = 0;
  std::map<std::string, ProductStats> stats_;
  std::vector<StatsEntry> entries_;
  std::map<std::string, CompetitorList> competitors_;
  std::map<std::string, std::size_t> product_index_;
  std::map<std::string, std::size_t> series_index_;
};

// Rows dated before `cutoff` train, the rest test. The cutoff sits at
// `train_fraction` of the dataset's calendar span.
struct ChronologicalSplit {
  Date cutoff;
  TrainingSet train;
  TrainingSet test;
};
ChronologicalSplit chronological_split(const ForecastContext& context,
                                       double train_fraction = 0.8);

struct EvaluationRow {
  std::string label;
  ModelKind kind = ModelKind::RandomForest;
  TrainingConfig config;
  MetricPair metrics;
};

// The five comparison rows in table order: Linear, RandomForest, XGBoost,
// MLP, GradientBoosting.
std::vector<EvaluationRow> evaluation_rows(std::uint64_t seed);

// Trains every row on split.train and fills in test metrics.
void run_evaluation(std::vector<EvaluationRow>& rows, const ChronologicalSplit& split);

}  // namespace promocast
