#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "promocast/domain.hpp"
#include "promocast/matrix.hpp"

namespace promocast {

// Flat binary regression tree. A node with feature < 0 is a leaf.
// Internal nodes send x to `left` when x[feature] < threshold.
struct TreeNode {
  int feature = -1;
  double threshold = 0.0;
  int left = -1;
  int right = -1;
  double value = 0.0;

  bool is_leaf() const { return feature < 0; }
  bool operator==(const TreeNode&) const = default;
};

class RegressionTree {
 public:
  RegressionTree() = default;
  // Checks structure; throws InvalidArgument on dangling children or
  // non-finite leaves.
  RegressionTree(std::vector<TreeNode> nodes, int max_depth);

  static RegressionTree leaf(double value);

  double predict(std::span<const double> x) const;
  const std::vector<TreeNode>& nodes() const { return nodes_; }
  int max_depth() const { return max_depth_; }
  int depth() const;

  bool operator==(const RegressionTree&) const = default;

 private:
  std::vector<TreeNode> nodes_;
  int max_depth_ = 0;
};

struct TreeGrowth {
  int max_depth = 8;
  std::size_t min_samples_leaf = 1;
  // Features examined per split; 0 means all.
  std::size_t max_features = 0;
  // L2 penalty on leaf values (XGBoost-style); 0 gives plain leaf means.
  double leaf_l2 = 0.0;
};

// Least-squares CART on the rows listed in `sample` (duplicates allowed).
RegressionTree grow_tree(const Matrix& X, std::span<const double> y,
                         std::span<const std::size_t> sample,
                         const TreeGrowth& growth, std::uint64_t seed);

struct ForestConfig {
  std::size_t n_trees = 100;
  int max_depth = 8;
  std::size_t min_samples_leaf = 1;
  // 0 means ceil(sqrt(d)).
  std::size_t max_features = 0;
  // 0 means hardware concurrency. Results do not depend on it.
  std::size_t threads = 0;
};

struct BoostingConfig {
  std::size_t n_trees = 200;
  int max_depth = 4;
  double learning_rate = 0.1;
  double leaf_l2 = 1.0;
  std::size_t min_samples_leaf = 1;
};

struct MlpConfig {
  std::vector<std::size_t> hidden = {64, 32};
  std::size_t epochs = 200;
  double learning_rate = 1e-3;
  std::size_t batch_size = 32;
};

struct LinearConfig {
  double ridge = 1e-8;
};

struct TrainingConfig {
  std::uint64_t seed = 42;
  std::size_t min_samples = 2;
  // Free-form row label, e.g. "XGBoost" vs "GradientBoosting".
  std::string label;
  ForestConfig forest;
  BoostingConfig boosting;
  MlpConfig mlp;
  LinearConfig linear;

  static TrainingConfig defaults(ModelKind kind);
  // Plain gradient boosting row of the evaluation table: 100 depth-3 trees
  // without leaf penalty.
  static TrainingConfig plain_boosting();
};

struct MlpLayer {
  std::size_t inputs = 0;
  std::size_t outputs = 0;
  std::vector<double> weights;  // outputs x inputs, row-major
  std::vector<double> bias;

  bool operator==(const MlpLayer&) const = default;
};

// Fully connected net, tanh hidden layers, linear scalar output. Inputs and
// target are standardized with the stored statistics.
struct MlpNetwork {
  std::vector<MlpLayer> layers;
  std::vector<double> input_mean;
  std::vector<double> input_scale;
  double target_mean = 0.0;
  double target_scale = 1.0;

  std::size_t parameter_count() const;
  bool operator==(const MlpNetwork&) const = default;
};

struct TrainedModel {
  ModelKind kind = ModelKind::RandomForest;
  std::size_t input_dim = 0;
  std::uint64_t layout_fingerprint = 0;
  // Dataset the model was fit on; 0 when unknown.
  std::uint64_t dataset_fingerprint = 0;
  TrainingConfig config;

  // RandomForest / GradientBoosting
  std::vector<RegressionTree> trees;
  double base_score = 0.0;  // boosting initial prediction
  double shrinkage = 1.0;   // boosting learning rate
  // MLP
  MlpNetwork mlp;
  // Linear
  std::vector<double> coefficients;
  double intercept = 0.0;
};

TrainedModel train(ModelKind kind, const Matrix& X, std::span<const double> y,
                   const TrainingConfig& config,
                   std::uint64_t layout_fingerprint = 0);

// Throws LayoutMismatch when x has the wrong width.
double predict(const TrainedModel& model, std::span<const double> x);
// Also checks the vector's layout fingerprint against the model's.
double predict(const TrainedModel& model, const FeatureVector& x);
std::vector<double> predict_rows(const TrainedModel& model, const Matrix& X);

// Ensemble prediction using only the first `tree_count` trees.
double predict_with_trees(const TrainedModel& model, std::span<const double> x,
                          std::size_t tree_count);

// How many internal nodes split on each feature, across all trees.
std::vector<std::size_t> split_usage(const TrainedModel& model);

struct MetricPair {
  double rmse = 0.0;
  std::optional<double> mape;  // percent; absent when every y is zero
};

MetricPair compute_metrics(std::span<const double> actual,
                           std::span<const double> predicted);
MetricPair evaluate(const TrainedModel& model, const Matrix& X,
                    std::span<const double> y);

// Parameters in layer order: weights (row-major) then bias, per layer.
std::vector<double> mlp_parameters(const TrainedModel& model);
void set_mlp_parameters(TrainedModel& model, std::span<const double> params);

// Gradient of 0.5 * (predict(x) - y)^2 with respect to mlp_parameters.
// Throws InvalidArgument for non-MLP models.
std::vector<double> mlp_gradient(const TrainedModel& model,
                                 std::span<const double> x, double y);

// Untrained MLP with Xavier-uniform weights and identity standardization.
TrainedModel make_mlp(std::size_t input_dim, std::span<const std::size_t> hidden,
                      std::uint64_t seed);

}  // namespace promocast
