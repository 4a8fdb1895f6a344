#pragma once

#include <json.hpp>

#include "promocast/analytics.hpp"
#include "promocast/domain.hpp"
#include "promocast/features.hpp"
#include "promocast/models.hpp"

// JSON encodings shared by the file formats, the CLI and the HTTP service.
namespace promocast {

using json = nlohmann::json;

void to_json(json& j, const Product& p);
void from_json(const json& j, Product& p);
void to_json(json& j, const SalesDay& d);
void to_json(json& j, const SalesSeries& s);
void to_json(json& j, const PromotionRecord& p);
void to_json(json& j, const ValidationReport& r);
void to_json(json& j, const ForecastResult& r);
void to_json(json& j, const ProductStats& s);
void to_json(json& j, const MetricPair& m);
void to_json(json& j, const Projection2D& p);
void to_json(json& j, const CompetitorList& c);

json layout_to_json(const FeatureLayout& layout);

json config_to_json(const TrainingConfig& config);
// Missing keys keep the defaults of `base`.
TrainingConfig config_from_json(const json& j, TrainingConfig base);

json model_to_json(const TrainedModel& model);
TrainedModel model_from_json(const json& j);

std::string hex64(std::uint64_t value);
std::uint64_t parse_hex64(const std::string& text);

}  // namespace promocast
