#include <gtest/gtest.h>

#include <cmath>

#include "oracles.hpp"
#include "promocast/error.hpp"
#include "promocast/models.hpp"
#include "promocast/rng.hpp"

using namespace promocast;

namespace {

struct Data {
  Matrix X;
  std::vector<double> y;
};

Data toy_data(std::size_t n, std::size_t d, std::uint64_t seed) {
  Rng rng(seed);
  Data out{Matrix(0, d), {}};
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<double> row(d);
    for (double& v : row) v = rng.uniform(-1, 1);
    double target = 2.0 * row[0] - row[d - 1] + 0.3 * row[0] * row[1 % d];
    out.y.push_back(target + rng.normal(0, 0.05));
    out.X.append_row(row);
  }
  return out;
}

TrainingConfig quick(ModelKind kind) {
  TrainingConfig c = TrainingConfig::defaults(kind);
  c.forest.n_trees = 20;
  c.boosting.n_trees = 40;
  c.mlp.epochs = 30;
  return c;
}

constexpr std::array<ModelKind, 4> kKinds = {ModelKind::RandomForest, ModelKind::GradientBoosting,
                                             ModelKind::MLP, ModelKind::Linear};

double stddev(const std::vector<double>& v) {
  double m = 0.0;
  for (double x : v) m += x;
  m /= static_cast<double>(v.size());
  double s = 0.0;
  for (double x : v) s += (x - m) * (x - m);
  return std::sqrt(s / static_cast<double>(v.size()));
}

}  // namespace

TEST(Train, ConstantTargetEveryKind) {
  Data d = toy_data(60, 4, 1);
  std::fill(d.y.begin(), d.y.end(), 7.5);
  for (ModelKind kind : kKinds) {
    SCOPED_TRACE(std::string(to_string(kind)));
    const TrainedModel m = train(kind, d.X, d.y, quick(kind));
    for (std::size_t i = 0; i < d.X.rows; ++i) EXPECT_NEAR(predict(m, d.X.row(i)), 7.5, 1e-6);
  }
}

TEST(Train, ForestFitsLinearSignal) {
  Rng rng(3);
  Data d{Matrix(0, 1), {}};
  for (int i = 0; i < 200; ++i) {
    const double x = rng.uniform(0, 10);
    d.X.append_row(std::vector<double>{x});
    d.y.push_back(3 * x);
  }
  const TrainedModel m = train(ModelKind::RandomForest, d.X, d.y,
                               TrainingConfig::defaults(ModelKind::RandomForest));
  const MetricPair metrics = evaluate(m, d.X, d.y);
  EXPECT_LT(metrics.rmse, 0.1 * stddev(d.y));
}

TEST(Train, Deterministic) {
  const Data d = toy_data(120, 5, 2);
  for (ModelKind kind : kKinds) {
    SCOPED_TRACE(std::string(to_string(kind)));
    const TrainedModel a = train(kind, d.X, d.y, quick(kind));
    const TrainedModel b = train(kind, d.X, d.y, quick(kind));
    EXPECT_EQ(a.trees, b.trees);
    EXPECT_EQ(a.mlp, b.mlp);
    EXPECT_EQ(a.coefficients, b.coefficients);
    EXPECT_EQ(a.base_score, b.base_score);
  }
}

TEST(Train, ForestIndependentOfThreadCount) {
  const Data d = toy_data(100, 6, 4);
  TrainingConfig one = quick(ModelKind::RandomForest);
  one.forest.threads = 1;
  TrainingConfig many = one;
  many.forest.threads = 7;
  EXPECT_EQ(train(ModelKind::RandomForest, d.X, d.y, one).trees,
            train(ModelKind::RandomForest, d.X, d.y, many).trees);
}

TEST(Train, RejectsBadInput) {
  Data d = toy_data(10, 2, 5);
  EXPECT_THROW(train(ModelKind::Linear, Matrix(0, 2), {}, quick(ModelKind::Linear)),
               InvalidArgument);
  d.y[3] = NAN;
  EXPECT_THROW(train(ModelKind::Linear, d.X, d.y, quick(ModelKind::Linear)), InvalidArgument);
  std::vector<double> short_y(3, 1.0);
  EXPECT_THROW(train(ModelKind::Linear, d.X, short_y, quick(ModelKind::Linear)),
               InvalidArgument);
}

TEST(Train, ConstantFeatureNeverSplit) {
  Data d = toy_data(150, 3, 6);
  for (std::size_t i = 0; i < d.X.rows; ++i) d.X(i, 1) = 4.0;
  for (ModelKind kind : {ModelKind::RandomForest, ModelKind::GradientBoosting}) {
    const TrainedModel m = train(kind, d.X, d.y, quick(kind));
    EXPECT_EQ(split_usage(m)[1], 0u);
    EXPECT_GT(split_usage(m)[0], 0u);
  }
}

TEST(Train, BoostingLossDecreases) {
  const Data d = toy_data(200, 4, 7);
  TrainingConfig c = quick(ModelKind::GradientBoosting);
  const TrainedModel m = train(ModelKind::GradientBoosting, d.X, d.y, c);
  double previous = INFINITY;
  for (std::size_t k = 0; k <= m.trees.size(); k += 5) {
    std::vector<double> pred;
    for (std::size_t i = 0; i < d.X.rows; ++i) pred.push_back(predict_with_trees(m, d.X.row(i), k));
    const double rmse = compute_metrics(d.y, pred).rmse;
    EXPECT_LE(rmse, previous + 1e-12);
    previous = rmse;
  }
}

TEST(Predict, HandBuiltTrees) {
  const RegressionTree leaf = RegressionTree::leaf(5.0);
  for (double v : {-3.0, 0.0, 12.0}) EXPECT_EQ(leaf.predict(std::vector<double>{v}), 5.0);

  TrainedModel forest;
  forest.kind = ModelKind::RandomForest;
  forest.input_dim = 1;
  forest.trees = {RegressionTree::leaf(4.0), RegressionTree::leaf(6.0)};
  EXPECT_EQ(predict(forest, std::vector<double>{0.3}), 5.0);

  const RegressionTree stump({{0, 1.0, 1, 2, 0.0}, {-1, 0, -1, -1, 2.0}, {-1, 0, -1, -1, 8.0}}, 1);
  EXPECT_EQ(stump.predict(std::vector<double>{0.0}), 2.0);
  EXPECT_EQ(stump.predict(std::vector<double>{1.0}), 8.0);
  EXPECT_EQ(stump.depth(), 1);
  EXPECT_THROW(RegressionTree({{0, 1.0, 1, 5, 0.0}, {-1, 0, -1, -1, 2.0}}, 1), InvalidArgument);
}

TEST(Predict, WidthMismatch) {
  const Data d = toy_data(30, 3, 8);
  const TrainedModel m = train(ModelKind::Linear, d.X, d.y, quick(ModelKind::Linear));
  EXPECT_THROW(predict(m, std::vector<double>{1.0, 2.0}), LayoutMismatch);
}

TEST(Evaluate, Examples) {
  const std::vector<double> y{100, 100}, same{100, 100}, off{110, 90};
  const MetricPair perfect = compute_metrics(y, same);
  EXPECT_EQ(perfect.rmse, 0.0);
  EXPECT_EQ(perfect.mape, 0.0);
  const MetricPair ten = compute_metrics(y, off);
  EXPECT_EQ(ten.rmse, 10.0);
  EXPECT_EQ(ten.mape, 10.0);
  const std::vector<double> y2{0, 10}, p2{5, 10};
  const MetricPair skip = compute_metrics(y2, p2);
  EXPECT_EQ(skip.rmse, std::sqrt(12.5));
  EXPECT_EQ(skip.mape, 0.0);
  const std::vector<double> zeros{0, 0}, any{1, 2};
  EXPECT_FALSE(compute_metrics(zeros, any).mape.has_value());
}

TEST(MlpGradient, ZeroNetStationary) {
  const std::vector<std::size_t> hidden{4, 3};
  TrainedModel m = make_mlp(3, hidden, 1);
  std::vector<double> params = mlp_parameters(m);
  std::fill(params.begin(), params.end(), 0.0);
  set_mlp_parameters(m, params);
  const std::vector<double> x{0.5, -1.0, 2.0};
  for (double g : mlp_gradient(m, x, 0.0)) EXPECT_EQ(g, 0.0);
}

TEST(MlpGradient, MatchesFiniteDifferences) {
  Rng rng(11);
  for (int net = 0; net < 20; ++net) {
    const std::size_t in = static_cast<std::size_t>(rng.uniform_int(2, 6));
    const std::vector<std::size_t> hidden{static_cast<std::size_t>(rng.uniform_int(2, 6)),
                                          static_cast<std::size_t>(rng.uniform_int(2, 5))};
    const TrainedModel m = make_mlp(in, hidden, 100 + net);
    std::vector<double> x(in);
    for (double& v : x) v = rng.uniform(-2, 2);
    EXPECT_LT(oracle::mlp_gradient_error(m, x, rng.uniform(-1, 1)), 1e-4) << "net " << net;
  }
}

TEST(MlpGradient, ScalesWithResidual) {
  // Doubling the residual doubles the gradient: 0.5 (f - y)^2 is quadratic.
  const std::vector<std::size_t> hidden{3};
  const TrainedModel m = make_mlp(2, hidden, 4);
  const std::vector<double> x{0.2, 0.7};
  const double f = predict(m, x);
  const std::vector<double> g1 = mlp_gradient(m, x, f - 1.0);
  const std::vector<double> g2 = mlp_gradient(m, x, f - 2.0);
  for (std::size_t i = 0; i < g1.size(); ++i) EXPECT_NEAR(g2[i], 2.0 * g1[i], 1e-12);
}

TEST(MlpParameters, RoundTrip) {
  const std::vector<std::size_t> hidden{5, 4};
  TrainedModel m = make_mlp(3, hidden, 9);
  const std::vector<double> p = mlp_parameters(m);
  EXPECT_EQ(p.size(), m.mlp.parameter_count());
  set_mlp_parameters(m, p);
  EXPECT_EQ(mlp_parameters(m), p);
  EXPECT_THROW(set_mlp_parameters(m, std::vector<double>(3)), InvalidArgument);
}
