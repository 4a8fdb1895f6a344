// Acceptance runner: one PASS/FAIL line per criterion, nonzero exit when
// any of them fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "promocast/analytics.hpp"
#include "promocast/error.hpp"
#include "promocast/explain.hpp"
#include "promocast/features.hpp"
#include "promocast/ingest.hpp"
#include "promocast/models.hpp"
#include "promocast/pipeline.hpp"
#include "promocast/promo_parser.hpp"
#include "promocast/whatif.hpp"

using namespace promocast;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;
};

void require(Outcome& o, bool ok, const std::string& why) {
  if (!ok && o.pass) {
    o.pass = false;
    o.detail = why;
  }
}

std::string fmt(const char* f, double a, double b = 0.0, double c = 0.0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, a, b, c);
  return buf;
}

constexpr std::size_t kPromoGroup = static_cast<std::size_t>(FeatureGroup::Promotion);

// The seed-7 world shared by the recovery and what-if checks.
struct RecoveryWorld {
  std::shared_ptr<const ForecastContext> context;
  ChronologicalSplit split;
  ModelHandle rf;
};

RecoveryWorld& recovery_world() {
  static RecoveryWorld w = [] {
    RecoveryWorld r;
    SyntheticConfig cfg;
    cfg.seed = 7;
    cfg.promo_lift = 1.0;
    cfg.base_demand = 100.0;
    cfg.noise_sd = 0.05 * cfg.base_demand;
    cfg.n_products = 20;
    cfg.n_days = 500;
    r.context = std::make_shared<const ForecastContext>(generate_synthetic(cfg).dataset);
    r.split = chronological_split(*r.context, 0.8);
    const TrainingConfig tc = TrainingConfig::defaults(ModelKind::RandomForest);
    r.rf.model = std::make_shared<const TrainedModel>(
        train(ModelKind::RandomForest, r.split.train.X, r.split.train.y, tc,
              FeatureLayout::standard().fingerprint()));
    r.rf.background = std::make_shared<const Background>(r.context->background(r.split.train));
    return r;
  }();
  return w;
}

Outcome parser_suite() {
  Outcome o;
  for (const auto& g : oracle::golden_promotions()) {
    const ParsedPromotion p = parse_promotion(g.text);
    require(o,
            p.kind == g.kind && p.k_d == g.k_d && p.p_t.to_double() == g.p_t &&
                p.reward == g.reward && p.flash_hours == g.flash_hours,
            std::string("golden form mismatch: ") + g.text);
  }
  Rng rng(20240501);
  int trips = 0;
  for (int i = 0; i < 1000; ++i) {
    const oracle::PromotionCase c = oracle::random_promotion(rng);
    try {
      const ParsedPromotion parsed = parse_promotion(c.text);
      require(o, parsed == c.expected, "wrong structure for " + c.text);
      require(o, parse_promotion(render_promotion(parsed)) == parsed,
              "render round-trip changed " + c.text);
      ++trips;
    } catch (const Error& e) {
      require(o, false, c.text + ": " + e.what());
    }
  }
  if (o.pass) o.detail = "6 golden forms, " + std::to_string(trips) + " round-trips";
  return o;
}

Outcome shapley_efficiency() {
  Outcome o;
  SyntheticConfig cfg;
  cfg.n_products = 20;
  cfg.n_days = 200;
  cfg.seed = 11;
  const ForecastContext ctx(generate_synthetic(cfg).dataset);
  const TrainingSet rows = ctx.training_set();
  const Background bg = ctx.background(rows);
  const GroupMap& groups = FeatureLayout::standard().group_map();
  double worst_eff = 0.0;
  double worst_oracle = 0.0;
  for (ModelKind kind : {ModelKind::RandomForest, ModelKind::GradientBoosting, ModelKind::MLP}) {
    TrainingConfig tc = TrainingConfig::defaults(kind);
    tc.mlp.epochs = 40;
    const TrainedModel model = train(kind, rows.X, rows.y, tc);
    Rng rng(99);
    for (int i = 0; i < 100; ++i) {
      const auto x = rows.X.row(static_cast<std::size_t>(
          rng.uniform_int(0, static_cast<std::int64_t>(rows.X.rows) - 1)));
      const GroupShapley s = shapley_groups(model, x, groups, bg);
      double sum = s.baseline;
      for (double phi : s.phi) sum += phi;
      worst_eff = std::max(worst_eff, std::abs(sum - predict(model, x)));
      const auto ref = oracle::permutation_shapley(model, x, groups, bg.rows);
      for (std::size_t g = 0; g < kGroupCount; ++g) {
        worst_oracle = std::max(worst_oracle, std::abs(s.phi[g] - ref[g]));
      }
    }
  }
  require(o, worst_eff < 1e-6, fmt("efficiency gap %.3g", worst_eff));
  require(o, worst_oracle < 1e-9, fmt("oracle gap %.3g", worst_oracle));
  if (o.pass) o.detail = fmt("max efficiency gap %.2g, max oracle gap %.2g", worst_eff, worst_oracle);
  return o;
}

Outcome null_player_and_symmetry() {
  Outcome o;
  constexpr std::size_t kDim = FeatureLayout::kSize;
  const GroupMap& groups = FeatureLayout::standard().group_map();
  Rng rng(5);
  auto random_matrix = [&](std::size_t n) {
    Matrix m(0, kDim);
    for (std::size_t i = 0; i < n; ++i) {
      std::vector<double> row(kDim);
      for (double& v : row) v = rng.uniform(-1, 1);
      m.append_row(row);
    }
    return m;
  };

  // A forest fit where the description slots never vary cannot use them.
  Matrix X = random_matrix(300);
  std::vector<double> y;
  for (std::size_t i = 0; i < X.rows; ++i) {
    for (std::size_t slot : groups[static_cast<std::size_t>(FeatureGroup::Descriptions)]) {
      X(i, slot) = 0.5;
    }
    const auto r = X.row(i);
    y.push_back(r[FeatureLayout::kPrice] * r[FeatureLayout::kPromotionStrength] +
                r[FeatureLayout::kAverages]);
  }
  TrainingConfig tc = TrainingConfig::defaults(ModelKind::RandomForest);
  tc.forest.n_trees = 20;
  const TrainedModel forest = train(ModelKind::RandomForest, X, y, tc);
  const Background bg = make_background(random_matrix(32));
  const Matrix xs = random_matrix(20);
  for (std::size_t i = 0; i < xs.rows; ++i) {
    const GroupShapley s = shapley_groups(forest, xs.row(i), groups, bg);
    require(o, s.phi[static_cast<std::size_t>(FeatureGroup::Descriptions)] == 0.0,
            "unused group received credit");
  }

  // Constant model: every group is a null player.
  TrainedModel constant;
  constant.kind = ModelKind::Linear;
  constant.input_dim = kDim;
  constant.coefficients.assign(kDim, 0.0);
  constant.intercept = 7.0;
  for (double phi : shapley_groups(constant, xs.row(0), groups, bg).phi) {
    require(o, phi == 0.0, "constant model gave nonzero credit");
  }

  // f(a, b) symmetric in price and promotion strength, evaluated where both
  // inputs agree against a background that treats them alike.
  auto symmetric_tree = [] {
    using N = TreeNode;
    const int a = static_cast<int>(FeatureLayout::kPrice);
    const int b = static_cast<int>(FeatureLayout::kPromotionStrength);
    std::vector<N> nodes = {
        {a, 0.5, 1, 2, 0.0},  {b, 0.5, 3, 4, 0.0},  {b, 0.5, 5, 6, 0.0},
        {-1, 0, -1, -1, 0.0}, {-1, 0, -1, -1, 1.0}, {-1, 0, -1, -1, 1.0},
        {-1, 0, -1, -1, 3.0},
    };
    TrainedModel m;
    m.kind = ModelKind::RandomForest;
    m.input_dim = kDim;
    m.trees.emplace_back(std::move(nodes), 2);
    return m;
  }();
  TrainedModel additive = constant;
  additive.intercept = 0.0;
  additive.coefficients[FeatureLayout::kPrice] = 1.5;
  additive.coefficients[FeatureLayout::kPromotionStrength] = 1.5;

  Matrix sym_bg(0, kDim);
  for (int i = 0; i < 16; ++i) {
    std::vector<double> row(kDim, 0.0);
    row[FeatureLayout::kPrice] = row[FeatureLayout::kPromotionStrength] = rng.uniform(0, 1);
    sym_bg.append_row(row);
  }
  const Background sbg = make_background(sym_bg);
  double worst = 0.0;
  for (const TrainedModel* m : {&symmetric_tree, &additive}) {
    for (double v : {0.2, 0.7, 1.0}) {
      std::vector<double> x(kDim, 0.0);
      x[FeatureLayout::kPrice] = x[FeatureLayout::kPromotionStrength] = v;
      const GroupShapley s = shapley_groups(*m, x, groups, sbg);
      worst = std::max(worst, std::abs(s.phi[static_cast<std::size_t>(FeatureGroup::Price)] -
                                       s.phi[kPromoGroup]));
    }
  }
  require(o, worst <= 1e-9, fmt("symmetric gap %.3g", worst));
  if (o.pass) o.detail = fmt("null players exact, symmetric gap %.2g", worst);
  return o;
}

Outcome mlp_gradient_check() {
  Outcome o;
  double worst = 0.0;
  Rng rng(77);
  for (int n = 0; n < 20; ++n) {
    const std::size_t dim = static_cast<std::size_t>(rng.uniform_int(2, 8));
    std::vector<std::size_t> hidden;
    const int depth = static_cast<int>(rng.uniform_int(1, 2));
    for (int l = 0; l < depth; ++l) hidden.push_back(static_cast<std::size_t>(rng.uniform_int(2, 6)));
    const TrainedModel m = make_mlp(dim, hidden, 1000 + static_cast<std::uint64_t>(n));
    std::vector<double> x(dim);
    for (double& v : x) v = rng.uniform(-1, 1);
    worst = std::max(worst, oracle::mlp_gradient_error(m, x, rng.uniform(-1, 1)));
  }
  require(o, worst < 1e-4, fmt("max relative error %.3g", worst));
  if (o.pass) o.detail = fmt("max relative error %.2g over 20 networks", worst);
  return o;
}

Outcome synthetic_recovery() {
  Outcome o;
  const RecoveryWorld& w = recovery_world();
  const MetricPair metrics = evaluate(*w.rf.model, w.split.test.X, w.split.test.y);
  const double mape = metrics.mape.value_or(INFINITY);
  require(o, mape <= 20.0, fmt("RandomForest MAPE %.2f%% > 20%%", mape));

  std::size_t promo_days = 0;
  std::size_t positive = 0;
  const GroupMap& groups = FeatureLayout::standard().group_map();
  for (std::size_t i = 0; i < w.split.test.X.rows; ++i) {
    const auto x = w.split.test.X.row(i);
    if (x[FeatureLayout::kPromotionStrength] <= 0.0) continue;
    ++promo_days;
    if (shapley_groups(*w.rf.model, x, groups, *w.rf.background).phi[kPromoGroup] > 0.0) ++positive;
  }
  const double share = promo_days ? static_cast<double>(positive) / promo_days : 0.0;
  require(o, promo_days > 0, "no promotion days in the test window");
  require(o, share >= 0.8, fmt("promotion credit positive on %.1f%% of promo days", 100 * share));
  if (o.pass || o.detail.empty()) {
    o.detail = fmt("MAPE %.2f%%, promotion credit positive on %.1f%% of %.0f promo days", mape,
                   100 * share, static_cast<double>(promo_days));
  }
  return o;
}

Outcome whatif_identity_and_direction() {
  Outcome o;
  const RecoveryWorld& w = recovery_world();
  const WhatIfEngine engine(w.context);
  const Date last = w.context->series(w.context->dataset().products.front().id).days.back().date;
  std::size_t eligible = 0;
  std::size_t lowered = 0;
  for (const Product& p : w.context->dataset().products) {
    Scenario s;
    s.product_id = p.id;
    s.horizon_end = last;
    s.horizon_start = last - (w.context->options().horizon_cap - 1);
    const ScenarioRun same = engine.run(s, w.rf);
    require(o, same.scenario.predictions == same.baseline.predictions,
            "zero-edit scenario differs for " + p.id);
    require(o, same.comparison.total_delta == 0.0, "zero-edit delta nonzero for " + p.id);

    const std::vector<PromotionRecord> before = w.context->promotions(p.id);
    for (const PromotionRecord& r : before) {
      ScenarioEdit e;
      e.op = EditOp::Delete;
      e.target_id = r.id;
      s.edits.push_back(e);
    }
    const ScenarioRun removed = engine.run(s, w.rf);
    double base = 0.0;
    double after = 0.0;
    std::size_t days = 0;
    for (std::size_t d = 0; d < removed.baseline.horizon.size(); ++d) {
      const Date day = removed.baseline.horizon[d];
      bool active = false;
      for (const PromotionRecord& r : before) {
        active = active || lifecycle_status(r, day) == LifecycleStatus::Active;
      }
      if (!active) continue;
      base += removed.baseline.predictions[d];
      after += removed.scenario.predictions[d];
      ++days;
    }
    if (days == 0) continue;
    ++eligible;
    if (after / days < base / days) ++lowered;
  }
  const double share = eligible ? static_cast<double>(lowered) / eligible : 0.0;
  require(o, eligible > 0, "no product had promotion days in the horizon");
  require(o, share >= 0.9, fmt("deleting promotions lowered sales for %.0f of %.0f products",
                               static_cast<double>(lowered), static_cast<double>(eligible)));
  if (o.pass) {
    o.detail = fmt("identity bit-exact; deletion lowered promo-day mean for %.0f of %.0f products",
                   static_cast<double>(lowered), static_cast<double>(eligible));
  }
  return o;
}

Outcome competitor_oracle() {
  Outcome o;
  Rng rng(31);
  std::size_t checks = 0;
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<StatsEntry> all(200);
    const int categories = static_cast<int>(rng.uniform_int(1, 6));
    for (std::size_t i = 0; i < all.size(); ++i) {
      all[i].product_id = "p" + std::to_string(i);
      all[i].category = "c" + std::to_string(rng.uniform_int(1, categories));
      for (double& v : all[i].normalized) v = rng.uniform(0, 1);
    }
    const std::size_t k = static_cast<std::size_t>(rng.uniform_int(1, 12));
    for (const StatsEntry& target : all) {
      const CompetitorList got = top_competitors(target, all, k);
      const auto want = oracle::brute_force_competitors(target, all, k);
      require(o, got.ids == want, "mismatch for " + target.product_id);
      require(o, got.short_list == (want.size() < k), "short-list flag wrong");
      ++checks;
    }
  }
  if (o.pass) o.detail = std::to_string(checks) + " queries over 100 trials";
  return o;
}

Outcome projection() {
  Outcome o;
  double worst_purity = 1.0;
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    std::vector<int> labels;
    const Matrix points = oracle::two_clusters(30, 6, 100 + seed, labels);
    TsneOptions opt;
    opt.perplexity = 10;
    opt.seed = seed;
    const Projection2D a = project_products(points, opt);
    const Projection2D b = project_products(points, opt);
    require(o, !a.pca_fallback, "unexpected PCA fallback");
    require(o, a.coords == b.coords, "projection not deterministic");
    require(o, a.final_kl <= a.initial_kl, fmt("KL rose on seed %.0f", static_cast<double>(seed)));
    worst_purity = std::min(worst_purity, oracle::nearest_neighbor_purity(a.coords, labels));
  }
  require(o, worst_purity >= 0.9, fmt("purity %.3f", worst_purity));
  if (o.pass) o.detail = fmt("min purity %.3f over 5 seeds", worst_purity);
  return o;
}

Outcome growth_rates() {
  Outcome o;
  SalesSeries s{"p", {}};
  const Date d0 = Date::from_ymd(2022, 3, 1);
  const std::vector<std::int64_t> units = {100, 120, 120, 0, 40};
  for (std::size_t i = 0; i < units.size(); ++i) {
    s.days.push_back({d0 + static_cast<std::int32_t>(i), units[i], Money::from_cents(999)});
  }
  require(o, growth_rate(s, d0 + 1) == 0.2, "100 -> 120 should be 0.2");
  require(o, growth_rate(s, d0 + 2) == 0.0, "flat day should be 0");
  bool raised = false;
  try {
    growth_rate(s, d0 + 4);
  } catch (const UndefinedGrowth&) {
    raised = true;
  }
  require(o, raised, "zero previous day did not raise UndefinedGrowth");
  if (o.pass) o.detail = "0.2, 0 and UndefinedGrowth";
  return o;
}

Outcome evaluate_metrics() {
  Outcome o;
  const std::vector<double> y1 = {3, 5, 7};
  const MetricPair perfect = compute_metrics(y1, y1);
  require(o, perfect.rmse == 0.0 && perfect.mape == 0.0, "perfect predictions");
  const MetricPair ten = compute_metrics(std::vector<double>{100, 100}, std::vector<double>{110, 90});
  require(o, ten.rmse == 10.0 && ten.mape == 10.0, fmt("got (%g, %g)", ten.rmse, ten.mape.value_or(-1)));
  const MetricPair skip = compute_metrics(std::vector<double>{0, 10}, std::vector<double>{5, 10});
  require(o, skip.rmse == std::sqrt(12.5) && skip.mape == 0.0, "zero row not skipped");
  const MetricPair none = compute_metrics(std::vector<double>{0, 0}, std::vector<double>{1, 2});
  require(o, !none.mape.has_value(), "all-zero actuals should leave MAPE absent");
  if (o.pass) o.detail = "(0, 0%), (10, 10%), (sqrt 12.5, 0%)";
  return o;
}

struct Criterion {
  const char* name;
  double budget_s;
  std::function<Outcome()> run;
};

}  // namespace

int main() {
  const std::vector<Criterion> criteria = {
      {"parser-golden-and-roundtrip", 5, parser_suite},
      {"shapley-efficiency", 60, shapley_efficiency},
      {"shapley-null-player-and-symmetry", 0, null_player_and_symmetry},
      {"mlp-gradient-check", 0, mlp_gradient_check},
      {"synthetic-recovery", 300, synthetic_recovery},
      {"whatif-identity-and-direction", 0, whatif_identity_and_direction},
      {"competitor-oracle", 0, competitor_oracle},
      {"projection", 0, projection},
      {"growth-rate", 0, growth_rates},
      {"evaluate-metrics", 0, evaluate_metrics},
  };
  int failures = 0;
  for (const Criterion& c : criteria) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("threw: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (c.budget_s > 0 && secs >= c.budget_s) {
      o.pass = false;
      o.detail += fmt(" (over the %.0f s budget)", c.budget_s);
    }
    std::printf("%s %s: %s [%.2f s]\n", o.pass ? "PASS" : "FAIL", c.name, o.detail.c_str(), secs);
    std::fflush(stdout);
    failures += o.pass ? 0 : 1;
  }
  return failures == 0 ? 0 : 1;
}
