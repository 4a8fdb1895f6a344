#include "promocast/json_io.hpp"

#include <cstdio>

#include "promocast/error.hpp"

namespace promocast {

std::string hex64(std::uint64_t value) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(value));
  return buf;
}

std::uint64_t parse_hex64(const std::string& text) {
  if (text.empty() || text.size() > 16) throw InvalidArgument("bad hex value '" + text + "'");
  std::uint64_t v = 0;
  for (char c : text) {
    v <<= 4;
    if (c >= '0' && c <= '9') v |= static_cast<std::uint64_t>(c - '0');
    else if (c >= 'a' && c <= 'f') v |= static_cast<std::uint64_t>(c - 'a' + 10);
    else throw InvalidArgument("bad hex value '" + text + "'");
  }
  return v;
}

void to_json(json& j, const Product& p) {
  j = json{{"id", p.id},       {"title", p.title}, {"category", p.category},
           {"brand", p.brand}, {"store", p.store}, {"base_price", p.base_price.to_double()}};
}

void from_json(const json& j, Product& p) {
  p.id = j.at("id").get<std::string>();
  p.title = j.value("title", "");
  p.category = j.value("category", "");
  p.brand = j.value("brand", "");
  p.store = j.value("store", "");
  p.base_price = Money::from_double(j.at("base_price").get<double>());
}

void to_json(json& j, const SalesDay& d) {
  j = json{{"date", d.date.to_string()},
           {"units_sold", d.units_sold},
           {"price", d.price.to_double()}};
}

void to_json(json& j, const SalesSeries& s) {
  j = json{{"product_id", s.product_id}, {"days", s.days}};
}

void to_json(json& j, const PromotionRecord& p) {
  j = json{{"id", p.id},
           {"product_id", p.product_id},
           {"raw_text", p.raw_text},
           {"kind", std::string(to_string(p.kind))},
           {"k_d", p.k_d},
           {"p_t", p.p_t.to_double()},
           {"reward", p.reward},
           {"flash_hours", p.flash_hours},
           {"start", p.start.to_string()},
           {"end", p.end.to_string()},
           {"enabled", p.enabled}};
}

void to_json(json& j, const ValidationReport& r) {
  j = json{{"ok", r.ok}, {"violations", json::array()}};
  for (const Violation& v : r.violations) {
    j["violations"].push_back(
        {{"locator", v.locator}, {"rule", v.rule}, {"message", v.message}});
  }
}

namespace {

json attribution_json(const GroupAttribution& a) {
  json out = json::object();
  for (std::size_t g = 0; g < kGroupCount; ++g) {
    out[std::string(to_string(kAllGroups[g]))] = a[g];
  }
  return out;
}

}  // namespace

void to_json(json& j, const ForecastResult& r) {
  j = json{{"model_kind", std::string(to_string(r.model_kind))},
           {"product_id", r.product_id},
           {"baseline", r.baseline},
           {"days", json::array()}};
  for (std::size_t i = 0; i < r.horizon.size(); ++i) {
    json day{{"date", r.horizon[i].to_string()}, {"prediction", r.predictions[i]}};
    if (i < r.attributions.size()) day["attribution"] = attribution_json(r.attributions[i]);
    if (i < r.normalized_attributions.size()) {
      day["attribution_normalized"] = attribution_json(r.normalized_attributions[i]);
    }
    j["days"].push_back(std::move(day));
  }
}

void to_json(json& j, const ProductStats& s) {
  j = json{{"median", s.median},         {"std", s.std},
           {"iqr", s.iqr},               {"corr_price", s.corr_price},
           {"corr_promo", s.corr_promo}, {"corr_season", s.corr_season}};
}

void to_json(json& j, const MetricPair& m) {
  j = json{{"rmse", m.rmse}, {"mape", m.mape ? json(*m.mape) : json(nullptr)}};
}

void to_json(json& j, const Projection2D& p) {
  j = json{{"seed", p.seed},
           {"perplexity", p.perplexity},
           {"pca_fallback", p.pca_fallback},
           {"initial_kl", p.initial_kl},
           {"final_kl", p.final_kl},
           {"coords", json::array()}};
  for (const auto& c : p.coords) j["coords"].push_back({c[0], c[1]});
}

void to_json(json& j, const CompetitorList& c) {
  j = json{{"ids", c.ids}, {"distances", c.distances}, {"short_list", c.short_list}};
}

json layout_to_json(const FeatureLayout& layout) {
  json slots = json::array();
  for (std::size_t i = 0; i < layout.slots().size(); ++i) {
    const SlotInfo& s = layout.slots()[i];
    slots.push_back({{"index", i},
                     {"name", s.name},
                     {"group", std::string(to_string(s.group))},
                     {"unit", s.unit}});
  }
  json groups = json::object();
  for (std::size_t g = 0; g < kGroupCount; ++g) {
    groups[std::string(to_string(kAllGroups[g]))] = layout.group_map()[g];
  }
  return json{{"fingerprint", hex64(layout.fingerprint())},
              {"size", layout.size()},
              {"groups", groups},
              {"slots", slots}};
}

json config_to_json(const TrainingConfig& c) {
  return json{
      {"seed", c.seed},
      {"min_samples", c.min_samples},
      {"label", c.label},
      {"forest",
       {{"n_trees", c.forest.n_trees},
        {"max_depth", c.forest.max_depth},
        {"min_samples_leaf", c.forest.min_samples_leaf},
        {"max_features", c.forest.max_features},
        {"threads", c.forest.threads}}},
      {"boosting",
       {{"n_trees", c.boosting.n_trees},
        {"max_depth", c.boosting.max_depth},
        {"learning_rate", c.boosting.learning_rate},
        {"leaf_l2", c.boosting.leaf_l2},
        {"min_samples_leaf", c.boosting.min_samples_leaf}}},
      {"mlp",
       {{"hidden", c.mlp.hidden},
        {"epochs", c.mlp.epochs},
        {"learning_rate", c.mlp.learning_rate},
        {"batch_size", c.mlp.batch_size}}},
      {"linear", {{"ridge", c.linear.ridge}}},
  };
}

TrainingConfig config_from_json(const json& j, TrainingConfig c) {
  if (!j.is_object()) throw InvalidArgument("training config must be a JSON object");
  auto read = [](const json& obj, const char* key, auto& field) {
    if (obj.contains(key)) field = obj.at(key).get<std::decay_t<decltype(field)>>();
  };
  read(j, "seed", c.seed);
  read(j, "min_samples", c.min_samples);
  read(j, "label", c.label);
  if (j.contains("forest")) {
    const json& f = j.at("forest");
    read(f, "n_trees", c.forest.n_trees);
    read(f, "max_depth", c.forest.max_depth);
    read(f, "min_samples_leaf", c.forest.min_samples_leaf);
    read(f, "max_features", c.forest.max_features);
    read(f, "threads", c.forest.threads);
  }
  if (j.contains("boosting")) {
    const json& b = j.at("boosting");
    read(b, "n_trees", c.boosting.n_trees);
    read(b, "max_depth", c.boosting.max_depth);
    read(b, "learning_rate", c.boosting.learning_rate);
    read(b, "leaf_l2", c.boosting.leaf_l2);
    read(b, "min_samples_leaf", c.boosting.min_samples_leaf);
  }
  if (j.contains("mlp")) {
    const json& m = j.at("mlp");
    read(m, "hidden", c.mlp.hidden);
    read(m, "epochs", c.mlp.epochs);
    read(m, "learning_rate", c.mlp.learning_rate);
    read(m, "batch_size", c.mlp.batch_size);
  }
  if (j.contains("linear")) read(j.at("linear"), "ridge", c.linear.ridge);
  return c;
}

json model_to_json(const TrainedModel& m) {
  json j{{"kind", std::string(to_string(m.kind))},
         {"input_dim", m.input_dim},
         {"layout_fingerprint", hex64(m.layout_fingerprint)},
         {"config", config_to_json(m.config)}};
  if (m.dataset_fingerprint != 0) j["dataset_fingerprint"] = hex64(m.dataset_fingerprint);
  switch (m.kind) {
    case ModelKind::RandomForest:
    case ModelKind::GradientBoosting: {
      json trees = json::array();
      for (const RegressionTree& t : m.trees) {
        json nodes = json::array();
        for (const TreeNode& n : t.nodes()) {
          nodes.push_back({n.feature, n.threshold, n.left, n.right, n.value});
        }
        trees.push_back({{"max_depth", t.max_depth()}, {"nodes", std::move(nodes)}});
      }
      j["trees"] = std::move(trees);
      j["base_score"] = m.base_score;
      j["shrinkage"] = m.shrinkage;
      break;
    }
    case ModelKind::MLP: {
      json layers = json::array();
      for (const MlpLayer& l : m.mlp.layers) {
        layers.push_back({{"inputs", l.inputs},
                          {"outputs", l.outputs},
                          {"weights", l.weights},
                          {"bias", l.bias}});
      }
      j["mlp"] = {{"layers", std::move(layers)},
                  {"input_mean", m.mlp.input_mean},
                  {"input_scale", m.mlp.input_scale},
                  {"target_mean", m.mlp.target_mean},
                  {"target_scale", m.mlp.target_scale}};
      break;
    }
    case ModelKind::Linear:
      j["coefficients"] = m.coefficients;
      j["intercept"] = m.intercept;
      break;
  }
  return j;
}

TrainedModel model_from_json(const json& j) {
  TrainedModel m;
  m.kind = model_kind_from_string(j.at("kind").get<std::string>());
  m.input_dim = j.at("input_dim").get<std::size_t>();
  m.layout_fingerprint = parse_hex64(j.at("layout_fingerprint").get<std::string>());
  m.config = config_from_json(j.at("config"), TrainingConfig::defaults(m.kind));
  if (j.contains("dataset_fingerprint")) {
    m.dataset_fingerprint = parse_hex64(j.at("dataset_fingerprint").get<std::string>());
  }
  switch (m.kind) {
    case ModelKind::RandomForest:
    case ModelKind::GradientBoosting: {
      for (const json& t : j.at("trees")) {
        std::vector<TreeNode> nodes;
        for (const json& n : t.at("nodes")) {
          TreeNode node;
          node.feature = n.at(0).get<int>();
          node.threshold = n.at(1).get<double>();
          node.left = n.at(2).get<int>();
          node.right = n.at(3).get<int>();
          node.value = n.at(4).get<double>();
          if (node.feature >= static_cast<int>(m.input_dim)) {
            throw InvalidArgument("tree splits on a feature beyond input_dim");
          }
          nodes.push_back(node);
        }
        m.trees.emplace_back(std::move(nodes), t.at("max_depth").get<int>());
      }
      m.base_score = j.at("base_score").get<double>();
      m.shrinkage = j.at("shrinkage").get<double>();
      break;
    }
    case ModelKind::MLP: {
      const json& net = j.at("mlp");
      for (const json& l : net.at("layers")) {
        MlpLayer layer;
        layer.inputs = l.at("inputs").get<std::size_t>();
        layer.outputs = l.at("outputs").get<std::size_t>();
        layer.weights = l.at("weights").get<std::vector<double>>();
        layer.bias = l.at("bias").get<std::vector<double>>();
        if (layer.weights.size() != layer.inputs * layer.outputs ||
            layer.bias.size() != layer.outputs) {
          throw InvalidArgument("MLP layer shape mismatch");
        }
        m.mlp.layers.push_back(std::move(layer));
      }
      m.mlp.input_mean = net.at("input_mean").get<std::vector<double>>();
      m.mlp.input_scale = net.at("input_scale").get<std::vector<double>>();
      m.mlp.target_mean = net.at("target_mean").get<double>();
      m.mlp.target_scale = net.at("target_scale").get<double>();
      break;
    }
    case ModelKind::Linear:
      m.coefficients = j.at("coefficients").get<std::vector<double>>();
      m.intercept = j.at("intercept").get<double>();
      if (m.coefficients.size() != m.input_dim) {
        throw InvalidArgument("coefficient count mismatch");
      }
      break;
  }
  return m;
}

}  // namespace promocast
