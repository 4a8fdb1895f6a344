#pragma once
// Small synthetic world shared by the what-if and service tests.

#include <memory>

#include "promocast/ingest.hpp"
#include "promocast/pipeline.hpp"
#include "promocast/whatif.hpp"

namespace promocast::fixture {

inline SyntheticConfig small_world_config() {
  SyntheticConfig c;
  c.n_products = 6;
  c.n_days = 200;
  c.n_categories = 2;
  c.seed = 3;
  return c;
}

struct World {
  std::shared_ptr<const ForecastContext> context;
  ModelHandle handle;
};

inline World make_world(ModelKind kind = ModelKind::RandomForest) {
  World w;
  w.context = std::make_shared<const ForecastContext>(
      generate_synthetic(small_world_config()).dataset);
  const TrainingSet rows = w.context->training_set();
  TrainingConfig cfg = TrainingConfig::defaults(kind);
  cfg.forest.n_trees = 25;
  cfg.boosting.n_trees = 40;
  cfg.mlp.epochs = 10;
  w.handle.model = std::make_shared<const TrainedModel>(
      train(kind, rows.X, rows.y, cfg, FeatureLayout::standard().fingerprint()));
  w.handle.background = std::make_shared<const Background>(w.context->background(rows));
  return w;
}

}  // namespace promocast::fixture
