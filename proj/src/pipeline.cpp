#include "promocast/pipeline.hpp"

#include <algorithm>
#include <cmath>

#include "promocast/error.hpp"
#include "promocast/ingest.hpp"

namespace promocast {

namespace {

std::vector<std::string> titles_of(const Dataset& ds) {
  std::vector<std::string> titles;
  for (const Product& p : ds.products) titles.push_back(p.title);
  return titles;
}

}  // namespace

ForecastContext::ForecastContext(Dataset dataset, PipelineOptions options)
    : dataset_(std::move(dataset)),
      options_(options),
      codebook_(build_codebook(titles_of(dataset_))),
      embedder_(codebook_, options_.embed_seed),
      fingerprint_(dataset_fingerprint(dataset_)) {
  for (std::size_t i = 0; i < dataset_.products.size(); ++i) {
    product_index_[dataset_.products[i].id] = i;
  }
  for (std::size_t i = 0; i < dataset_.sales.size(); ++i) {
    series_index_[dataset_.sales[i].product_id] = i;
  }

  std::vector<ProductStats> raw;
  std::vector<const Product*> owners;
  for (const Product& p : dataset_.products) {
    auto it = series_index_.find(p.id);
    if (it == series_index_.end()) continue;
    const SalesSeries& s = dataset_.sales[it->second];
    if (s.days.size() < kMinStatsDays || !(p.base_price > Money())) continue;
    const std::vector<PromotionRecord> promos = dataset_.promotions_for(p.id);
    raw.push_back(product_stats(s, promos, p.base_price.to_double(), options_.features.rates));
    owners.push_back(&p);
    stats_[p.id] = raw.back();
  }
  const std::vector<StatsVector> normalized = normalize_stats(raw);
  for (std::size_t i = 0; i < owners.size(); ++i) {
    entries_.push_back({owners[i]->id, owners[i]->category, normalized[i]});
  }
  for (const StatsEntry& e : entries_) {
    competitors_[e.product_id] = top_competitors(e, entries_, options_.competitors);
  }
}

const CompetitorList& ForecastContext::competitors(const std::string& product_id) const {
  static const CompetitorList kNone{{}, {}, true};
  if (!product_index_.count(product_id)) throw NotFound("unknown product '" + product_id + "'");
  auto it = competitors_.find(product_id);
  return it == competitors_.end() ? kNone : it->second;
}

const Product& ForecastContext::product(const std::string& product_id) const {
  auto it = product_index_.find(product_id);
  if (it == product_index_.end()) throw NotFound("unknown product '" + product_id + "'");
  return dataset_.products[it->second];
}

const SalesSeries& ForecastContext::series(const std::string& product_id) const {
  auto it = series_index_.find(product_id);
  if (it == series_index_.end()) {
    throw NotFound("no sales for product '" + product_id + "'");
  }
  return dataset_.sales[it->second];
}

std::vector<PromotionRecord> ForecastContext::promotions(const std::string& product_id) const {
  product(product_id);
  return dataset_.promotions_for(product_id);
}

std::vector<const SalesSeries*> ForecastContext::competitor_series(
    const std::string& product_id) const {
  std::vector<const SalesSeries*> out;
  for (const std::string& id : competitors(product_id).ids) out.push_back(&series(id));
  return out;
}

FeatureVector ForecastContext::features(const std::string& product_id, Date day,
                                        std::span<const PromotionRecord> promotions) const {
  const std::vector<const SalesSeries*> comps = competitor_series(product_id);
  return assemble_features(product(product_id), day, series(product_id), promotions, comps,
                           embedder_, codebook_, options_.features);
}

FeatureVector ForecastContext::features(const std::string& product_id, Date day) const {
  const std::vector<PromotionRecord> promos = promotions(product_id);
  return features(product_id, day, promos);
}

TrainingSet ForecastContext::training_set(Date from, Date to) const {
  TrainingSet out;
  out.X = Matrix(0, FeatureLayout::kSize);
  for (const Product& p : dataset_.products) {
    auto sit = series_index_.find(p.id);
    if (sit == series_index_.end() || !(p.base_price > Money())) continue;
    const SalesSeries& s = dataset_.sales[sit->second];
    const std::vector<PromotionRecord> promos = dataset_.promotions_for(p.id);
    const std::vector<const SalesSeries*> comps = competitor_series(p.id);
    for (std::size_t i = 1; i < s.days.size(); ++i) {
      const Date day = s.days[i].date;
      if (day < from || day > to) continue;
      const FeatureVector fv = assemble_features(p, day, s, promos, comps, embedder_,
                                                 codebook_, options_.features);
      out.X.append_row(fv.values);
      out.y.push_back(static_cast<double>(s.days[i].units_sold));
      out.rows.push_back({p.id, day});
    }
  }
  return out;
}

TrainingSet ForecastContext::training_set() const {
  const auto span = dataset_.span();
  if (!span) throw InvalidArgument("dataset has no sales");
  return training_set(span->first, span->second);
}

Background ForecastContext::background(const TrainingSet& training) const {
  return sample_background(training.X, options_.background_size, options_.background_seed,
                           FeatureLayout::standard().fingerprint());
}

ForecastResult ForecastContext::forecast(const TrainedModel& model,
                                         const Background& background,
                                         const std::string& product_id, Date start,
                                         Date end,
                                         std::span<const PromotionRecord> promotions) const {
  const FeatureLayout& layout = FeatureLayout::standard();
  if (model.layout_fingerprint != layout.fingerprint() || model.input_dim != layout.size()) {
    throw LayoutMismatch("model was trained on a different feature layout");
  }
  const Product& prod = product(product_id);
  const SalesSeries& s = series(product_id);
  if (s.days.empty()) throw InvalidArgument("product '" + product_id + "' has no sales");
  if (start > end) throw InvalidArgument("horizon start is after its end");
  const Date first = s.days.front().date;
  const Date last = s.days.back().date;
  if (start <= first) {
    throw InvalidArgument("horizon must start after the first sales day " + first.to_string());
  }
  if (end > last + options_.horizon_cap) {
    throw InvalidArgument("horizon ends more than " + std::to_string(options_.horizon_cap) +
                          " days after the last sales day " + last.to_string());
  }

  const std::vector<const SalesSeries*> comps = competitor_series(product_id);
  const double base_price = prod.base_price.to_double();
  std::vector<double> history;
  const std::size_t before = s.count_before(start);
  history.reserve(before + static_cast<std::size_t>(end - start) + 1);
  for (std::size_t i = 0; i < before; ++i) {
    history.push_back(static_cast<double>(s.days[i].units_sold));
  }

  ForecastResult result;
  result.model_kind = model.kind;
  result.product_id = product_id;
  for (Date day = start; day <= end; day += 1) {
    const FeatureVector fv = assemble_features(
        prod, day, price_on(s, day, base_price), history, promotions,
        competitor_snapshot(comps, day), embedder_, codebook_, options_.features);
    const GroupShapley attribution = shapley_groups(model, fv, background);
    const double raw = predict(model, fv);
    const double prediction = std::max(0.0, raw);
    result.horizon.push_back(day);
    result.predictions.push_back(prediction);
    result.attributions.push_back(attribution.phi);
    result.normalized_attributions.push_back(normalize_attribution(attribution.phi));
    result.baseline = attribution.baseline;
    if (const auto idx = s.index_of(day)) {
      history.push_back(static_cast<double>(s.days[*idx].units_sold));
    } else if (day > last) {
      history.push_back(prediction);
    }
  }
  return result;
}

ForecastResult ForecastContext::forecast(const TrainedModel& model,
                                         const Background& background,
                                         const std::string& product_id, Date start,
                                         Date end) const {
  const std::vector<PromotionRecord> promos = promotions(product_id);
  return forecast(model, background, product_id, start, end, promos);
}

ChronologicalSplit chronological_split(const ForecastContext& context, double train_fraction) {
  if (!(train_fraction > 0.0 && train_fraction < 1.0)) {
    throw InvalidArgument("train fraction must lie strictly between 0 and 1");
  }
  const auto span = context.dataset().span();
  if (!span) throw InvalidArgument("dataset has no sales");
  const std::int32_t days = span->second - span->first + 1;
  ChronologicalSplit split;
  split.cutoff = span->first + static_cast<std::int32_t>(std::floor(train_fraction * days));
  split.train = context.training_set(span->first, split.cutoff - 1);
  split.test = context.training_set(split.cutoff, span->second);
  if (split.train.y.empty() || split.test.y.empty()) {
    throw InvalidArgument("split leaves an empty train or test set");
  }
  return split;
}

std::vector<EvaluationRow> evaluation_rows(std::uint64_t seed) {
  std::vector<EvaluationRow> rows;
  auto add = [&](ModelKind kind, TrainingConfig config) {
    config.seed = seed;
    rows.push_back({config.label, kind, config, {}});
  };
  add(ModelKind::Linear, TrainingConfig::defaults(ModelKind::Linear));
  add(ModelKind::RandomForest, TrainingConfig::defaults(ModelKind::RandomForest));
  add(ModelKind::GradientBoosting, TrainingConfig::defaults(ModelKind::GradientBoosting));
  add(ModelKind::MLP, TrainingConfig::defaults(ModelKind::MLP));
  add(ModelKind::GradientBoosting, TrainingConfig::plain_boosting());
  return rows;
}

void run_evaluation(std::vector<EvaluationRow>& rows, const ChronologicalSplit& split) {
  const std::uint64_t layout = FeatureLayout::standard().fingerprint();
  for (EvaluationRow& row : rows) {
    const TrainedModel model = train(row.kind, split.train.X, split.train.y, row.config, layout);
    row.metrics = evaluate(model, split.test.X, split.test.y);
  }
}

}  // namespace promocast
