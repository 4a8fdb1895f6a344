#include "promocast/models.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <numeric>
#include <thread>

#include "promocast/error.hpp"
#include "promocast/rng.hpp"

namespace promocast {

// ---------------------------------------------------------------------------
// Trees

RegressionTree::RegressionTree(std::vector<TreeNode> nodes, int max_depth)
    : nodes_(std::move(nodes)), max_depth_(max_depth) {
  if (nodes_.empty()) throw InvalidArgument("tree has no nodes");
  const int n = static_cast<int>(nodes_.size());
  for (const TreeNode& node : nodes_) {
    if (node.is_leaf()) {
      if (!std::isfinite(node.value)) throw InvalidArgument("non-finite leaf value");
    } else if (node.left <= 0 || node.left >= n || node.right <= 0 ||
               node.right >= n) {
      throw InvalidArgument("internal node with missing child");
    }
  }
}

RegressionTree RegressionTree::leaf(double value) {
  TreeNode node;
  node.value = value;
  return RegressionTree({node}, 0);
}

double RegressionTree::predict(std::span<const double> x) const {
  const TreeNode* node = &nodes_[0];
  while (!node->is_leaf()) {
    node = &nodes_[static_cast<std::size_t>(
        x[static_cast<std::size_t>(node->feature)] < node->threshold ? node->left
                                                                     : node->right)];
  }
  return node->value;
}

int RegressionTree::depth() const {
  std::vector<int> d(nodes_.size(), 0);
  int deepest = 0;
  // Children always follow their parent in storage order.
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    const TreeNode& node = nodes_[i];
    deepest = std::max(deepest, d[i]);
    if (!node.is_leaf()) {
      d[static_cast<std::size_t>(node.left)] = d[i] + 1;
      d[static_cast<std::size_t>(node.right)] = d[i] + 1;
    }
  }
  return deepest;
}

namespace {

class TreeBuilder {
 public:
  TreeBuilder(const Matrix& X, std::span<const double> y, const TreeGrowth& growth,
              std::uint64_t seed)
      : X_(X), y_(y), growth_(growth), rng_(seed), order_(X.cols) {
    std::iota(order_.begin(), order_.end(), std::size_t{0});
  }

  RegressionTree build(std::vector<std::size_t> rows) {
    rows_ = std::move(rows);
    grow(0, rows_.size(), 0);
    return RegressionTree(std::move(nodes_), growth_.max_depth);
  }

 private:
  struct Split {
    double gain = 0.0;
    int feature = -1;
    double threshold = 0.0;
  };

  int grow(std::size_t begin, std::size_t end, int depth) {
    const int id = static_cast<int>(nodes_.size());
    nodes_.emplace_back();
    const std::size_t n = end - begin;
    double sum = 0.0;
    bool constant = true;
    const double first = y_[rows_[begin]];
    for (std::size_t i = begin; i < end; ++i) {
      sum += y_[rows_[i]];
      constant = constant && y_[rows_[i]] == first;
    }
    nodes_[static_cast<std::size_t>(id)].value =
        sum / (static_cast<double>(n) + growth_.leaf_l2);

    if (depth >= growth_.max_depth || constant ||
        n < 2 * std::max<std::size_t>(1, growth_.min_samples_leaf)) {
      return id;
    }
    const Split split = find_split(begin, end, sum);
    if (split.feature < 0) return id;

    const auto f = static_cast<std::size_t>(split.feature);
    auto mid = std::partition(
        rows_.begin() + static_cast<std::ptrdiff_t>(begin),
        rows_.begin() + static_cast<std::ptrdiff_t>(end),
        [&](std::size_t r) { return X_(r, f) < split.threshold; });
    const auto cut = static_cast<std::size_t>(mid - rows_.begin());

    const int left = grow(begin, cut, depth + 1);
    const int right = grow(cut, end, depth + 1);
    TreeNode& node = nodes_[static_cast<std::size_t>(id)];
    node.feature = split.feature;
    node.threshold = split.threshold;
    node.left = left;
    node.right = right;
    return id;
  }

  Split find_split(std::size_t begin, std::size_t end, double total) {
    const std::size_t d = X_.cols;
    const std::size_t wanted =
        growth_.max_features == 0 ? d : std::min(growth_.max_features, d);
    if (wanted < d) {
      for (std::size_t i = d - 1; i > 0; --i) {
        std::swap(order_[i], order_[static_cast<std::size_t>(
                                 rng_.uniform_int(0, static_cast<std::int64_t>(i)))]);
      }
    }
    const std::size_t n = end - begin;
    const double lambda = growth_.leaf_l2;
    const double parent = total * total / (static_cast<double>(n) + lambda);
    const double min_gain = 1e-12 * std::max(1.0, std::abs(parent));
    const std::size_t min_leaf = std::max<std::size_t>(1, growth_.min_samples_leaf);

    Split best;
    std::size_t examined = 0;
    scratch_.resize(n);
    for (std::size_t oi = 0; oi < d && examined < wanted; ++oi) {
      const std::size_t f = wanted < d ? order_[oi] : oi;
      for (std::size_t i = 0; i < n; ++i) {
        const std::size_t r = rows_[begin + i];
        scratch_[i] = {X_(r, f), y_[r]};
      }
      std::sort(scratch_.begin(), scratch_.end(),
                [](const auto& a, const auto& b) { return a.first < b.first; });
      if (scratch_.front().first == scratch_.back().first) continue;  // constant here
      ++examined;
      double left_sum = 0.0;
      for (std::size_t i = 0; i + 1 < n; ++i) {
        left_sum += scratch_[i].second;
        const double lo = scratch_[i].first;
        const double hi = scratch_[i + 1].first;
        if (lo == hi) continue;
        const std::size_t nl = i + 1;
        const std::size_t nr = n - nl;
        if (nl < min_leaf || nr < min_leaf) continue;
        const double right_sum = total - left_sum;
        const double gain = left_sum * left_sum / (static_cast<double>(nl) + lambda) +
                            right_sum * right_sum / (static_cast<double>(nr) + lambda) -
                            parent;
        if (gain > best.gain && gain > min_gain) {
          double threshold = lo + (hi - lo) / 2.0;
          if (!(threshold > lo)) threshold = hi;
          best = {gain, static_cast<int>(f), threshold};
        }
      }
    }
    return best;
  }

  const Matrix& X_;
  std::span<const double> y_;
  TreeGrowth growth_;
  Rng rng_;
  std::vector<std::size_t> order_;
  std::vector<std::size_t> rows_;
  std::vector<TreeNode> nodes_;
  std::vector<std::pair<double, double>> scratch_;
};

void check_training_data(const Matrix& X, std::span<const double> y,
                         const TrainingConfig& config) {
  if (X.rows != y.size()) {
    throw InvalidArgument("feature rows (" + std::to_string(X.rows) +
                          ") and targets (" + std::to_string(y.size()) +
                          ") differ in length");
  }
  if (X.rows < std::max<std::size_t>(1, config.min_samples)) {
    throw InvalidArgument("too few samples: " + std::to_string(X.rows) + " < " +
                          std::to_string(config.min_samples));
  }
  if (X.cols == 0) throw InvalidArgument("feature rows are empty");
  for (double v : X.data) {
    if (!std::isfinite(v)) throw InvalidArgument("non-finite feature value");
  }
  for (double v : y) {
    if (!std::isfinite(v)) throw InvalidArgument("non-finite target value");
  }
}

std::vector<RegressionTree> train_forest(const Matrix& X, std::span<const double> y,
                                         const TrainingConfig& config) {
  const ForestConfig& fc = config.forest;
  TreeGrowth growth;
  growth.max_depth = fc.max_depth;
  growth.min_samples_leaf = fc.min_samples_leaf;
  growth.max_features =
      fc.max_features ? fc.max_features
                      : static_cast<std::size_t>(
                            std::ceil(std::sqrt(static_cast<double>(X.cols))));

  std::vector<RegressionTree> trees(fc.n_trees);
  auto grow_one = [&](std::size_t t) {
    // Each tree owns a seed stream, so the thread split cannot change results.
    Rng rng(derive_seed(config.seed, 2 * t));
    std::vector<std::size_t> sample(X.rows);
    for (std::size_t& r : sample) {
      r = static_cast<std::size_t>(rng.uniform_int(0, static_cast<std::int64_t>(X.rows) - 1));
    }
    trees[t] = grow_tree(X, y, sample, growth, derive_seed(config.seed, 2 * t + 1));
  };

  std::size_t threads = fc.threads ? fc.threads : std::thread::hardware_concurrency();
  threads = std::clamp<std::size_t>(threads, 1, std::max<std::size_t>(1, fc.n_trees));
  if (threads == 1) {
    for (std::size_t t = 0; t < fc.n_trees; ++t) grow_one(t);
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t w = 0; w < threads; ++w) {
      pool.emplace_back([&, w] {
        for (std::size_t t = w; t < fc.n_trees; t += threads) grow_one(t);
      });
    }
  }
  return trees;
}

void train_boosting(TrainedModel& model, const Matrix& X, std::span<const double> y) {
  const BoostingConfig& bc = model.config.boosting;
  if (!(bc.learning_rate > 0.0 && bc.learning_rate <= 1.0)) {
    throw InvalidArgument("boosting learning rate must be in (0, 1]");
  }
  TreeGrowth growth;
  growth.max_depth = bc.max_depth;
  growth.min_samples_leaf = bc.min_samples_leaf;
  growth.leaf_l2 = bc.leaf_l2;

  const std::size_t n = X.rows;
  model.base_score = std::accumulate(y.begin(), y.end(), 0.0) / static_cast<double>(n);
  model.shrinkage = bc.learning_rate;
  std::vector<double> current(n, model.base_score);
  std::vector<double> residual(n);
  std::vector<std::size_t> all(n);
  std::iota(all.begin(), all.end(), std::size_t{0});
  for (std::size_t t = 0; t < bc.n_trees; ++t) {
    for (std::size_t i = 0; i < n; ++i) residual[i] = y[i] - current[i];
    RegressionTree tree =
        grow_tree(X, residual, all, growth, derive_seed(model.config.seed, t));
    for (std::size_t i = 0; i < n; ++i) {
      current[i] += bc.learning_rate * tree.predict(X.row(i));
    }
    model.trees.push_back(std::move(tree));
  }
}

// ---------------------------------------------------------------------------
// MLP

// Activations of every layer for one input; acts[0] is the standardized input.
void mlp_forward(const MlpNetwork& net, std::span<const double> z,
                 std::vector<std::vector<double>>& acts) {
  acts.resize(net.layers.size() + 1);
  acts[0].assign(z.begin(), z.end());
  for (std::size_t l = 0; l < net.layers.size(); ++l) {
    const MlpLayer& layer = net.layers[l];
    const bool hidden = l + 1 < net.layers.size();
    std::vector<double>& out = acts[l + 1];
    out.resize(layer.outputs);
    const std::vector<double>& in = acts[l];
    for (std::size_t o = 0; o < layer.outputs; ++o) {
      const double* w = layer.weights.data() + o * layer.inputs;
      double s = layer.bias[o];
      for (std::size_t i = 0; i < layer.inputs; ++i) s += w[i] * in[i];
      out[o] = hidden ? std::tanh(s) : s;
    }
  }
}

void standardize(const MlpNetwork& net, std::span<const double> x,
                 std::vector<double>& z) {
  z.resize(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    z[i] = (x[i] - net.input_mean[i]) / net.input_scale[i];
  }
}

// Adds d(loss)/d(params) to `grad` given d(loss)/d(net output).
void mlp_backward(const MlpNetwork& net, const std::vector<std::vector<double>>& acts,
                  double output_delta, std::span<double> grad,
                  std::vector<double>& delta, std::vector<double>& next_delta) {
  // Offsets of each layer's block in the flat parameter vector.
  std::vector<std::size_t> offset(net.layers.size());
  std::size_t pos = 0;
  for (std::size_t l = 0; l < net.layers.size(); ++l) {
    offset[l] = pos;
    pos += net.layers[l].weights.size() + net.layers[l].bias.size();
  }
  delta.assign(1, output_delta);
  for (std::size_t l = net.layers.size(); l-- > 0;) {
    const MlpLayer& layer = net.layers[l];
    const std::vector<double>& in = acts[l];
    double* gw = grad.data() + offset[l];
    double* gb = gw + layer.weights.size();
    for (std::size_t o = 0; o < layer.outputs; ++o) {
      const double d = delta[o];
      if (d == 0.0) continue;
      double* row = gw + o * layer.inputs;
      for (std::size_t i = 0; i < layer.inputs; ++i) row[i] += d * in[i];
      gb[o] += d;
    }
    if (l == 0) break;
    next_delta.assign(layer.inputs, 0.0);
    for (std::size_t o = 0; o < layer.outputs; ++o) {
      const double d = delta[o];
      if (d == 0.0) continue;
      const double* w = layer.weights.data() + o * layer.inputs;
      for (std::size_t i = 0; i < layer.inputs; ++i) next_delta[i] += w[i] * d;
    }
    for (std::size_t i = 0; i < layer.inputs; ++i) {
      next_delta[i] *= 1.0 - in[i] * in[i];  // tanh'
    }
    std::swap(delta, next_delta);
  }
}

void init_mlp(MlpNetwork& net, std::size_t input_dim,
              std::span<const std::size_t> hidden, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<std::size_t> sizes{input_dim};
  sizes.insert(sizes.end(), hidden.begin(), hidden.end());
  sizes.push_back(1);
  net.layers.clear();
  for (std::size_t l = 0; l + 1 < sizes.size(); ++l) {
    MlpLayer layer;
    layer.inputs = sizes[l];
    layer.outputs = sizes[l + 1];
    const double limit = std::sqrt(6.0 / static_cast<double>(layer.inputs + layer.outputs));
    layer.weights.resize(layer.inputs * layer.outputs);
    for (double& w : layer.weights) w = rng.uniform(-limit, limit);
    layer.bias.assign(layer.outputs, 0.0);
    net.layers.push_back(std::move(layer));
  }
  net.input_mean.assign(input_dim, 0.0);
  net.input_scale.assign(input_dim, 1.0);
  net.target_mean = 0.0;
  net.target_scale = 1.0;
}

void train_mlp(TrainedModel& model, const Matrix& X, std::span<const double> y) {
  const MlpConfig& mc = model.config.mlp;
  if (mc.batch_size == 0) throw InvalidArgument("batch size must be positive");
  MlpNetwork& net = model.mlp;
  init_mlp(net, X.cols, mc.hidden, derive_seed(model.config.seed, 0));

  const std::size_t n = X.rows;
  const std::size_t d = X.cols;
  for (std::size_t j = 0; j < d; ++j) {
    double mean = 0.0;
    for (std::size_t i = 0; i < n; ++i) mean += X(i, j);
    mean /= static_cast<double>(n);
    double var = 0.0;
    for (std::size_t i = 0; i < n; ++i) var += (X(i, j) - mean) * (X(i, j) - mean);
    const double sd = std::sqrt(var / static_cast<double>(n));
    net.input_mean[j] = mean;
    net.input_scale[j] = sd > 1e-12 ? sd : 1.0;
  }
  double ymean = std::accumulate(y.begin(), y.end(), 0.0) / static_cast<double>(n);
  double yvar = 0.0;
  for (double v : y) yvar += (v - ymean) * (v - ymean);
  const double ysd = std::sqrt(yvar / static_cast<double>(n));
  net.target_mean = ymean;
  net.target_scale = ysd > 1e-12 ? ysd : 1.0;

  if (ysd <= 1e-12) {
    // Constant target: a zero output layer reproduces it exactly.
    MlpLayer& out = net.layers.back();
    std::fill(out.weights.begin(), out.weights.end(), 0.0);
    std::fill(out.bias.begin(), out.bias.end(), 0.0);
    return;
  }

  Matrix Z(n, d);
  std::vector<double> zrow;
  for (std::size_t i = 0; i < n; ++i) {
    standardize(net, X.row(i), zrow);
    std::copy(zrow.begin(), zrow.end(), Z.row(i).begin());
  }

  const std::size_t p = net.parameter_count();
  std::vector<double> params = mlp_parameters(model);
  std::vector<double> m(p, 0.0), v(p, 0.0), grad(p);
  const double beta1 = 0.9, beta2 = 0.999, eps = 1e-8;
  std::size_t step = 0;

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  Rng rng(derive_seed(model.config.seed, 1));
  std::vector<std::vector<double>> acts;
  std::vector<double> delta, next_delta;

  for (std::size_t epoch = 0; epoch < mc.epochs; ++epoch) {
    for (std::size_t i = n - 1; i > 0; --i) {
      std::swap(order[i], order[static_cast<std::size_t>(
                              rng.uniform_int(0, static_cast<std::int64_t>(i)))]);
    }
    for (std::size_t start = 0; start < n; start += mc.batch_size) {
      const std::size_t stop = std::min(n, start + mc.batch_size);
      std::fill(grad.begin(), grad.end(), 0.0);
      for (std::size_t b = start; b < stop; ++b) {
        const std::size_t r = order[b];
        mlp_forward(net, Z.row(r), acts);
        const double target = (y[r] - net.target_mean) / net.target_scale;
        mlp_backward(net, acts, acts.back()[0] - target, grad, delta, next_delta);
      }
      const double inv = 1.0 / static_cast<double>(stop - start);
      ++step;
      const double c1 = 1.0 - std::pow(beta1, static_cast<double>(step));
      const double c2 = 1.0 - std::pow(beta2, static_cast<double>(step));
      for (std::size_t k = 0; k < p; ++k) {
        const double g = grad[k] * inv;
        m[k] = beta1 * m[k] + (1.0 - beta1) * g;
        v[k] = beta2 * v[k] + (1.0 - beta2) * g * g;
        params[k] -= mc.learning_rate * (m[k] / c1) / (std::sqrt(v[k] / c2) + eps);
      }
      set_mlp_parameters(model, params);
    }
  }
}

void train_linear(TrainedModel& model, const Matrix& X, std::span<const double> y) {
  const std::size_t n = X.rows;
  const std::size_t d = X.cols;
  Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>
      A(X.data.data(), static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(d));
  Eigen::Map<const Eigen::VectorXd> b(y.data(), static_cast<Eigen::Index>(n));
  const Eigen::RowVectorXd xmean = A.colwise().mean();
  const double ymean = b.mean();
  const Eigen::MatrixXd centered = A.rowwise() - xmean;
  Eigen::MatrixXd gram = centered.transpose() * centered;
  const double scale = std::max(1.0, gram.diagonal().mean());
  gram.diagonal().array() += model.config.linear.ridge * scale;
  const Eigen::VectorXd rhs = centered.transpose() * (b.array() - ymean).matrix();
  const Eigen::VectorXd beta = gram.ldlt().solve(rhs);
  model.coefficients.assign(beta.data(), beta.data() + d);
  model.intercept = ymean - xmean.dot(beta);
}

}  // namespace

RegressionTree grow_tree(const Matrix& X, std::span<const double> y,
                         std::span<const std::size_t> sample,
                         const TreeGrowth& growth, std::uint64_t seed) {
  if (sample.empty()) throw InvalidArgument("empty tree sample");
  TreeBuilder builder(X, y, growth, seed);
  return builder.build(std::vector<std::size_t>(sample.begin(), sample.end()));
}

std::size_t MlpNetwork::parameter_count() const {
  std::size_t p = 0;
  for (const MlpLayer& l : layers) p += l.weights.size() + l.bias.size();
  return p;
}

TrainingConfig TrainingConfig::defaults(ModelKind kind) {
  TrainingConfig c;
  switch (kind) {
    case ModelKind::RandomForest: c.label = "RandomForest"; break;
    case ModelKind::GradientBoosting: c.label = "XGBoost"; break;
    case ModelKind::MLP: c.label = "MLP"; break;
    case ModelKind::Linear: c.label = "Linear"; break;
  }
  return c;
}

TrainingConfig TrainingConfig::plain_boosting() {
  TrainingConfig c;
  c.label = "GradientBoosting";
  c.boosting.n_trees = 100;
  c.boosting.max_depth = 3;
  c.boosting.leaf_l2 = 0.0;
  return c;
}

TrainedModel train(ModelKind kind, const Matrix& X, std::span<const double> y,
                   const TrainingConfig& config, std::uint64_t layout_fingerprint) {
  check_training_data(X, y, config);
  TrainedModel model;
  model.kind = kind;
  model.input_dim = X.cols;
  model.layout_fingerprint = layout_fingerprint;
  model.config = config;
  switch (kind) {
    case ModelKind::RandomForest:
      if (config.forest.n_trees == 0) throw InvalidArgument("forest needs trees");
      model.trees = train_forest(X, y, config);
      break;
    case ModelKind::GradientBoosting:
      train_boosting(model, X, y);
      break;
    case ModelKind::MLP:
      train_mlp(model, X, y);
      break;
    case ModelKind::Linear:
      train_linear(model, X, y);
      break;
  }
  return model;
}

double predict_with_trees(const TrainedModel& model, std::span<const double> x,
                          std::size_t tree_count) {
  tree_count = std::min(tree_count, model.trees.size());
  if (model.kind == ModelKind::RandomForest) {
    if (tree_count == 0) throw InvalidArgument("forest has no trees");
    double sum = 0.0;
    for (std::size_t t = 0; t < tree_count; ++t) sum += model.trees[t].predict(x);
    return sum / static_cast<double>(tree_count);
  }
  if (model.kind == ModelKind::GradientBoosting) {
    double out = model.base_score;
    for (std::size_t t = 0; t < tree_count; ++t) {
      out += model.shrinkage * model.trees[t].predict(x);
    }
    return out;
  }
  throw InvalidArgument("model is not a tree ensemble");
}

double predict(const TrainedModel& model, std::span<const double> x) {
  if (x.size() != model.input_dim) {
    throw LayoutMismatch("input has " + std::to_string(x.size()) +
                         " features, model expects " +
                         std::to_string(model.input_dim));
  }
  switch (model.kind) {
    case ModelKind::RandomForest:
    case ModelKind::GradientBoosting:
      return predict_with_trees(model, x, model.trees.size());
    case ModelKind::MLP: {
      std::vector<double> z;
      standardize(model.mlp, x, z);
      std::vector<std::vector<double>> acts;
      mlp_forward(model.mlp, z, acts);
      return model.mlp.target_mean + model.mlp.target_scale * acts.back()[0];
    }
    case ModelKind::Linear: {
      double out = model.intercept;
      for (std::size_t i = 0; i < x.size(); ++i) out += model.coefficients[i] * x[i];
      return out;
    }
  }
  return 0.0;
}

double predict(const TrainedModel& model, const FeatureVector& x) {
  if (model.layout_fingerprint != 0 &&
      x.layout_fingerprint != model.layout_fingerprint) {
    throw LayoutMismatch("feature layout fingerprint does not match the model");
  }
  return predict(model, std::span<const double>(x.values));
}

std::vector<double> predict_rows(const TrainedModel& model, const Matrix& X) {
  std::vector<double> out(X.rows);
  for (std::size_t i = 0; i < X.rows; ++i) out[i] = predict(model, X.row(i));
  return out;
}

std::vector<std::size_t> split_usage(const TrainedModel& model) {
  std::vector<std::size_t> usage(model.input_dim, 0);
  for (const RegressionTree& tree : model.trees) {
    for (const TreeNode& node : tree.nodes()) {
      if (!node.is_leaf()) ++usage[static_cast<std::size_t>(node.feature)];
    }
  }
  return usage;
}

MetricPair compute_metrics(std::span<const double> actual,
                           std::span<const double> predicted) {
  if (actual.size() != predicted.size() || actual.empty()) {
    throw InvalidArgument("metrics need equally sized, nonempty inputs");
  }
  double sq = 0.0;
  double pct = 0.0;
  std::size_t counted = 0;
  for (std::size_t i = 0; i < actual.size(); ++i) {
    const double e = predicted[i] - actual[i];
    sq += e * e;
    if (actual[i] != 0.0) {
      pct += std::abs(e) / std::abs(actual[i]);
      ++counted;
    }
  }
  MetricPair m;
  m.rmse = std::sqrt(sq / static_cast<double>(actual.size()));
  if (counted) m.mape = pct / static_cast<double>(counted) * 100.0;
  return m;
}

MetricPair evaluate(const TrainedModel& model, const Matrix& X,
                    std::span<const double> y) {
  if (X.rows != y.size()) throw InvalidArgument("rows and targets differ in length");
  const std::vector<double> predicted = predict_rows(model, X);
  return compute_metrics(y, predicted);
}

std::vector<double> mlp_parameters(const TrainedModel& model) {
  if (model.kind != ModelKind::MLP) throw InvalidArgument("model is not an MLP");
  std::vector<double> params;
  params.reserve(model.mlp.parameter_count());
  for (const MlpLayer& l : model.mlp.layers) {
    params.insert(params.end(), l.weights.begin(), l.weights.end());
    params.insert(params.end(), l.bias.begin(), l.bias.end());
  }
  return params;
}

void set_mlp_parameters(TrainedModel& model, std::span<const double> params) {
  if (model.kind != ModelKind::MLP) throw InvalidArgument("model is not an MLP");
  if (params.size() != model.mlp.parameter_count()) {
    throw InvalidArgument("parameter vector has the wrong length");
  }
  std::size_t pos = 0;
  for (MlpLayer& l : model.mlp.layers) {
    std::copy_n(params.begin() + static_cast<std::ptrdiff_t>(pos), l.weights.size(),
                l.weights.begin());
    pos += l.weights.size();
    std::copy_n(params.begin() + static_cast<std::ptrdiff_t>(pos), l.bias.size(),
                l.bias.begin());
    pos += l.bias.size();
  }
}

std::vector<double> mlp_gradient(const TrainedModel& model, std::span<const double> x,
                                 double y) {
  if (model.kind != ModelKind::MLP) throw InvalidArgument("model is not an MLP");
  if (x.size() != model.input_dim) throw LayoutMismatch("input width mismatch");
  const MlpNetwork& net = model.mlp;
  std::vector<double> z;
  standardize(net, x, z);
  std::vector<std::vector<double>> acts;
  mlp_forward(net, z, acts);
  const double prediction = net.target_mean + net.target_scale * acts.back()[0];
  std::vector<double> grad(net.parameter_count(), 0.0);
  std::vector<double> delta, next_delta;
  mlp_backward(net, acts, (prediction - y) * net.target_scale, grad, delta,
               next_delta);
  return grad;
}

TrainedModel make_mlp(std::size_t input_dim, std::span<const std::size_t> hidden,
                      std::uint64_t seed) {
  TrainedModel model;
  model.kind = ModelKind::MLP;
  model.input_dim = input_dim;
  model.config = TrainingConfig::defaults(ModelKind::MLP);
  model.config.seed = seed;
  model.config.mlp.hidden.assign(hidden.begin(), hidden.end());
  init_mlp(model.mlp, input_dim, hidden, seed);
  return model;
}

}  // namespace promocast
