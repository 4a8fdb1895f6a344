#include "promocast/whatif.hpp"

#include <algorithm>

#include "promocast/analytics.hpp"
#include "promocast/promo_parser.hpp"

namespace promocast {

std::string_view to_string(EditOp op) {
  switch (op) {
    case EditOp::Add: return "Add";
    case EditOp::Delete: return "Delete";
    case EditOp::Modify: return "Modify";
    case EditOp::Toggle: return "Toggle";
    case EditOp::Shift: return "Shift";
  }
  return "?";
}

EditOp edit_op_from_string(std::string_view name) {
  for (EditOp op : {EditOp::Add, EditOp::Delete, EditOp::Modify, EditOp::Toggle, EditOp::Shift}) {
    if (to_string(op) == name) return op;
  }
  throw InvalidScenario("unknown edit op '" + std::string(name) + "'");
}

namespace {

std::vector<PromotionRecord>::iterator find_target(std::vector<PromotionRecord>& timeline,
                                                   const ScenarioEdit& edit) {
  auto it = std::find_if(timeline.begin(), timeline.end(), [&](const PromotionRecord& p) {
    return p.id == edit.target_id;
  });
  if (it == timeline.end()) {
    throw NotFound("no promotion '" + edit.target_id + "' to " +
                   std::string(to_string(edit.op)));
  }
  return it;
}

void check_window(const PromotionRecord& p) {
  if (p.start > p.end) {
    throw InvalidScenario("promotion '" + p.id + "' would start after it ends");
  }
}

}  // namespace

std::vector<PromotionRecord> apply_edits(std::span<const PromotionRecord> promotions,
                                         std::span<const ScenarioEdit> edits,
                                         const std::string& product_id) {
  std::vector<PromotionRecord> timeline(promotions.begin(), promotions.end());
  std::size_t added = 0;
  for (const ScenarioEdit& edit : edits) {
    switch (edit.op) {
      case EditOp::Add: {
        if (!edit.raw_text || !edit.start || !edit.end) {
          throw InvalidScenario("Add needs raw_text, start and end");
        }
        std::string id = edit.new_id.value_or("");
        if (id.empty()) {
          do {
            id = "scenario-" + std::to_string(++added);
          } while (std::any_of(timeline.begin(), timeline.end(),
                               [&](const PromotionRecord& p) { return p.id == id; }));
        } else if (std::any_of(timeline.begin(), timeline.end(),
                               [&](const PromotionRecord& p) { return p.id == id; })) {
          throw InvalidScenario("promotion id '" + id + "' already exists");
        }
        PromotionRecord rec = make_promotion(id, product_id, *edit.raw_text, *edit.start,
                                             *edit.end, edit.enabled.value_or(true));
        check_window(rec);
        timeline.push_back(std::move(rec));
        break;
      }
      case EditOp::Delete:
        timeline.erase(find_target(timeline, edit));
        break;
      case EditOp::Modify: {
        auto it = find_target(timeline, edit);
        PromotionRecord rec = *it;
        if (edit.raw_text) {
          rec = make_promotion(rec.id, rec.product_id, *edit.raw_text, rec.start, rec.end,
                               rec.enabled);
        }
        if (edit.start) rec.start = *edit.start;
        if (edit.end) rec.end = *edit.end;
        if (edit.enabled) rec.enabled = *edit.enabled;
        check_window(rec);
        *it = std::move(rec);
        break;
      }
      case EditOp::Toggle: {
        auto it = find_target(timeline, edit);
        it->enabled = edit.enabled.value_or(!it->enabled);
        break;
      }
      case EditOp::Shift: {
        auto it = find_target(timeline, edit);
        std::int32_t days = 0;
        if (edit.shift_days) {
          days = *edit.shift_days;
        } else if (edit.start) {
          days = *edit.start - it->start;
        } else {
          throw InvalidScenario("Shift needs days or start");
        }
        PromotionRecord rec = *it;
        rec.start = rec.start + days;
        rec.end = edit.end ? *edit.end : rec.end + days;
        check_window(rec);
        *it = std::move(rec);
        break;
      }
    }
  }
  return timeline;
}

ForecastResult run_scenario(const Scenario& scenario, const ForecastContext& context,
                            const TrainedModel& model, const Background& background) {
  if (model.kind != scenario.model_kind) {
    throw InvalidScenario("scenario asks for " + std::string(to_string(scenario.model_kind)) +
                          " but the model is " + std::string(to_string(model.kind)));
  }
  const std::vector<PromotionRecord> original = context.promotions(scenario.product_id);
  const std::vector<PromotionRecord> edited =
      apply_edits(original, scenario.edits, scenario.product_id);
  return context.forecast(model, background, scenario.product_id, scenario.horizon_start,
                          scenario.horizon_end, edited);
}

ScenarioComparison compare(const ForecastResult& baseline, const ForecastResult& scenario,
                           std::span<const PromotionRecord> promotions_before,
                           std::span<const PromotionRecord> promotions_after,
                           const SalesSeries& observed) {
  if (baseline.horizon != scenario.horizon) {
    throw InvalidArgument("baseline and scenario horizons differ");
  }
  if (baseline.model_kind != scenario.model_kind) {
    throw InvalidArgument("baseline and scenario used different model kinds");
  }
  ScenarioComparison out;
  out.horizon = baseline.horizon;
  for (std::size_t i = 0; i < baseline.horizon.size(); ++i) {
    const double delta = scenario.predictions[i] - baseline.predictions[i];
    out.per_day_delta.push_back(delta);
    out.total_delta += delta;
  }

  auto growth_for = [&](const ForecastResult& result,
                        std::span<const PromotionRecord> promos) {
    auto value_on = [&](Date day) -> std::optional<double> {
      if (!result.horizon.empty() && day >= result.horizon.front() &&
          day <= result.horizon.back()) {
        return result.predictions[static_cast<std::size_t>(day - result.horizon.front())];
      }
      if (const auto idx = observed.index_of(day)) {
        return static_cast<double>(observed.days[*idx].units_sold);
      }
      return std::nullopt;
    };
    std::vector<PromotionGrowth> rates;
    for (const PromotionRecord& p : promos) {
      if (!p.enabled || result.horizon.empty() || p.start < result.horizon.front() ||
          p.start > result.horizon.back()) {
        continue;
      }
      const auto prev = value_on(p.start - 1);
      const auto cur = value_on(p.start);
      if (!prev || !cur) continue;
      try {
        rates.push_back({p.id, p.start, growth_rate(*prev, *cur)});
      } catch (const UndefinedGrowth&) {
      }
    }
    return rates;
  };
  out.growth_before = growth_for(baseline, promotions_before);
  out.growth_after = growth_for(scenario, promotions_after);
  return out;
}

namespace {

Date json_date(const json& j, const char* key) {
  try {
    return Date::parse(j.at(key).get<std::string>());
  } catch (const json::exception&) {
    throw InvalidScenario(std::string("missing or non-string '") + key + "'");
  } catch (const ParseError& e) {
    throw InvalidScenario(std::string("bad '") + key + "': " + e.what());
  }
}

}  // namespace

Scenario scenario_from_json(const json& j) {
  if (!j.is_object()) throw InvalidScenario("scenario must be a JSON object");
  Scenario s;
  try {
    s.product_id = j.at("product_id").get<std::string>();
    const json& h = j.at("horizon");
    s.horizon_start = json_date(h, "start");
    s.horizon_end = json_date(h, "end");
    if (s.horizon_start > s.horizon_end) throw InvalidScenario("horizon start is after its end");
    if (j.contains("model_kind")) {
      try {
        s.model_kind = model_kind_from_string(j.at("model_kind").get<std::string>());
      } catch (const InvalidArgument& e) {
        throw InvalidScenario(e.what());
      }
    }
    for (const json& e : j.value("edits", json::array())) {
      ScenarioEdit edit;
      edit.op = edit_op_from_string(e.at("op").get<std::string>());
      if (edit.op != EditOp::Add) edit.target_id = e.at("target").get<std::string>();
      const json payload = e.value("payload", json::object());
      if (!payload.is_object()) throw InvalidScenario("edit payload must be an object");
      if (payload.contains("raw_text")) edit.raw_text = payload.at("raw_text").get<std::string>();
      if (payload.contains("start")) edit.start = json_date(payload, "start");
      if (payload.contains("end")) edit.end = json_date(payload, "end");
      if (payload.contains("enabled")) edit.enabled = payload.at("enabled").get<bool>();
      if (payload.contains("days")) edit.shift_days = payload.at("days").get<int>();
      if (payload.contains("id")) edit.new_id = payload.at("id").get<std::string>();
      s.edits.push_back(std::move(edit));
    }
  } catch (const json::exception& e) {
    throw InvalidScenario(std::string("malformed scenario: ") + e.what());
  }
  return s;
}

json scenario_to_json(const Scenario& s) {
  json edits = json::array();
  for (const ScenarioEdit& e : s.edits) {
    json payload = json::object();
    if (e.raw_text) payload["raw_text"] = *e.raw_text;
    if (e.start) payload["start"] = e.start->to_string();
    if (e.end) payload["end"] = e.end->to_string();
    if (e.enabled) payload["enabled"] = *e.enabled;
    if (e.shift_days) payload["days"] = *e.shift_days;
    if (e.new_id) payload["id"] = *e.new_id;
    json edit{{"op", std::string(to_string(e.op))}, {"payload", payload}};
    if (e.op != EditOp::Add) edit["target"] = e.target_id;
    edits.push_back(std::move(edit));
  }
  return json{{"product_id", s.product_id},
              {"horizon", {{"start", s.horizon_start.to_string()},
                           {"end", s.horizon_end.to_string()}}},
              {"model_kind", std::string(to_string(s.model_kind))},
              {"edits", std::move(edits)}};
}

void to_json(json& j, const ScenarioComparison& c) {
  auto growth = [](const std::vector<PromotionGrowth>& rates) {
    json out = json::array();
    for (const PromotionGrowth& g : rates) {
      out.push_back({{"promotion_id", g.promotion_id},
                     {"start", g.start.to_string()},
                     {"growth_rate", g.growth}});
    }
    return out;
  };
  json days = json::array();
  for (std::size_t i = 0; i < c.horizon.size(); ++i) {
    days.push_back({{"date", c.horizon[i].to_string()}, {"delta", c.per_day_delta[i]}});
  }
  j = json{{"days", std::move(days)},
           {"total_delta", c.total_delta},
           {"growth_before", growth(c.growth_before)},
           {"growth_after", growth(c.growth_after)}};
}

WhatIfEngine::WhatIfEngine(std::shared_ptr<const ForecastContext> context)
    : context_(std::move(context)) {
  if (!context_) throw InvalidArgument("what-if engine needs a context");
}

ForecastResult WhatIfEngine::baseline(const std::string& product_id, Date start, Date end,
                                      const ModelHandle& handle) const {
  const Key key{product_id, start.days_since_epoch(), end.days_since_epoch(),
                handle.model.get()};
  {
    std::lock_guard lock(mutex_);
    auto it = cache_.find(key);
    if (it != cache_.end()) return it->second.result;
  }
  ForecastResult result =
      context_->forecast(*handle.model, *handle.background, product_id, start, end);
  std::lock_guard lock(mutex_);
  cache_.emplace(key, Entry{handle, result});
  return result;
}

ScenarioRun WhatIfEngine::run(const Scenario& scenario, const ModelHandle& handle) const {
  if (!handle.model || !handle.background) throw InvalidArgument("empty model handle");
  ScenarioRun out;
  const std::vector<PromotionRecord> original = context_->promotions(scenario.product_id);
  out.edited_promotions = apply_edits(original, scenario.edits, scenario.product_id);
  out.baseline = baseline(scenario.product_id, scenario.horizon_start, scenario.horizon_end,
                          handle);
  out.scenario = run_scenario(scenario, *context_, *handle.model, *handle.background);
  out.comparison = compare(out.baseline, out.scenario, original, out.edited_promotions,
                           context_->series(scenario.product_id));
  return out;
}

}  // namespace promocast
