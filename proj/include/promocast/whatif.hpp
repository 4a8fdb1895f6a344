#pragma once

#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <tuple>
#include <vector>

#include "promocast/domain.hpp"
#include "promocast/error.hpp"
#include "promocast/json_io.hpp"
#include "promocast/pipeline.hpp"

namespace promocast {

class InvalidScenario : public Error {
 public:
  using Error::Error;
};

enum class EditOp { Add, Delete, Modify, Toggle, Shift };

std::string_view to_string(EditOp op);
EditOp edit_op_from_string(std::string_view name);

struct ScenarioEdit {
  EditOp op = EditOp::Toggle;
  std::string target_id;  // unused by Add
  std::optional<std::string> raw_text;
  std::optional<Date> start;
  std::optional<Date> end;
  std::optional<bool> enabled;
  std::optional<int> shift_days;
  std::optional<std::string> new_id;  // Add only
};

struct Scenario {
  std::string product_id;
  Date horizon_start;
  Date horizon_end;
  std::vector<ScenarioEdit> edits;
  ModelKind model_kind = ModelKind::RandomForest;
};

// Returns the edited copy of `promotions`; the input is never touched.
// Throws NotFound for unknown targets, UnrecognizedPromotion when Add/Modify
// text does not parse, and InvalidScenario for incomplete payloads.
std::vector<PromotionRecord> apply_edits(std::span<const PromotionRecord> promotions,
                                         std::span<const ScenarioEdit> edits,
                                         const std::string& product_id);

// Predictions over the scenario horizon with the edited timeline.
ForecastResult run_scenario(const Scenario& scenario, const ForecastContext& context,
                            const TrainedModel& model, const Background& background);

struct PromotionGrowth {
  std::string promotion_id;
  Date start;
  double growth = 0.0;
};

struct ScenarioComparison {
  std::vector<Date> horizon;
  std::vector<double> per_day_delta;  // scenario - baseline
  double total_delta = 0.0;
  std::vector<PromotionGrowth> growth_before;
  std::vector<PromotionGrowth> growth_after;
};

// Growth is measured at each enabled promotion's first day inside the
// horizon, on a timeline of observed sales before the horizon and predictions
// within it. Days with zero previous-day sales are skipped. Throws
// InvalidArgument when the two results do not share horizon and model kind.
ScenarioComparison compare(const ForecastResult& baseline, const ForecastResult& scenario,
                           std::span<const PromotionRecord> promotions_before,
                           std::span<const PromotionRecord> promotions_after,
                           const SalesSeries& observed);

Scenario scenario_from_json(const json& j);
json scenario_to_json(const Scenario& s);
void to_json(json& j, const ScenarioComparison& c);

// A trained model together with the background it is explained against.
struct ModelHandle {
  std::shared_ptr<const TrainedModel> model;
  std::shared_ptr<const Background> background;
};

struct ScenarioRun {
  ForecastResult baseline;
  ForecastResult scenario;
  ScenarioComparison comparison;
  std::vector<PromotionRecord> edited_promotions;
};

// What-if runner over one immutable context. Baseline (unedited) forecasts
// are cached per (product, horizon, model); safe for concurrent use.
class WhatIfEngine {
 public:
  explicit WhatIfEngine(std::shared_ptr<const ForecastContext> context);

  const ForecastContext& context() const { return *context_; }

  ScenarioRun run(const Scenario& scenario, const ModelHandle& handle) const;

  ForecastResult baseline(const std::string& product_id, Date start, Date end,
                          const ModelHandle& handle) const;

 private:
  using Key = std::tuple<std::string, std::int32_t, std::int32_t, const TrainedModel*>;
  struct Entry {
    ModelHandle handle;  // keeps the keyed model alive
    ForecastResult result;
  };

  std::shared_ptr<const ForecastContext> context_;
  mutable std::mutex mutex_;
  mutable std::map<Key, Entry> cache_;
};

}  // namespace promocast
