#include "promocast/explain.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numeric>

#include "promocast/error.hpp"
#include "promocast/rng.hpp"

namespace promocast {

Background make_background(Matrix rows, std::uint64_t layout_fingerprint) {
  if (rows.rows == 0) throw InvalidArgument("background needs at least one row");
  Background bg;
  bg.slot_means.assign(rows.cols, 0.0);
  for (std::size_t i = 0; i < rows.rows; ++i) {
    for (std::size_t j = 0; j < rows.cols; ++j) bg.slot_means[j] += rows(i, j);
  }
  for (double& m : bg.slot_means) m /= static_cast<double>(rows.rows);
  bg.rows = std::move(rows);
  bg.layout_fingerprint = layout_fingerprint;
  return bg;
}

Background sample_background(const Matrix& training_rows, std::size_t size,
                             std::uint64_t seed, std::uint64_t layout_fingerprint) {
  if (training_rows.rows == 0) throw InvalidArgument("no rows to sample from");
  std::vector<std::size_t> idx(training_rows.rows);
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  const std::size_t take = std::min(size, idx.size());
  Rng rng(seed);
  for (std::size_t i = 0; i < take; ++i) {
    const auto j = static_cast<std::size_t>(
        rng.uniform_int(static_cast<std::int64_t>(i),
                        static_cast<std::int64_t>(idx.size()) - 1));
    std::swap(idx[i], idx[j]);
  }
  std::sort(idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(take));
  Matrix rows(take, training_rows.cols);
  for (std::size_t i = 0; i < take; ++i) {
    const auto src = training_rows.row(idx[i]);
    std::copy(src.begin(), src.end(), rows.row(i).begin());
  }
  return make_background(std::move(rows), layout_fingerprint);
}

std::vector<double> coalition_values(const TrainedModel& model,
                                     std::span<const double> x,
                                     const GroupMap& groups,
                                     const Background& background) {
  if (background.rows.rows == 0) throw InvalidArgument("empty background");
  if (x.size() != model.input_dim || background.rows.cols != x.size()) {
    throw LayoutMismatch("instance, background and model widths disagree");
  }
  check_group_map(groups, x.size());

  constexpr std::size_t kCoalitions = std::size_t{1} << kGroupCount;
  std::vector<double> values(kCoalitions, 0.0);
  std::vector<double> composite(x.size());
  for (std::size_t mask = 0; mask < kCoalitions; ++mask) {
    double total = 0.0;
    for (std::size_t b = 0; b < background.rows.rows; ++b) {
      const auto ref = background.rows.row(b);
      for (std::size_t g = 0; g < kGroupCount; ++g) {
        const bool present = (mask >> g) & 1U;
        for (std::size_t slot : groups[g]) composite[slot] = present ? x[slot] : ref[slot];
      }
      total += predict(model, std::span<const double>(composite));
    }
    values[mask] = total / static_cast<double>(background.rows.rows);
  }
  return values;
}

GroupShapley shapley_groups(const TrainedModel& model, std::span<const double> x,
                            const GroupMap& groups, const Background& background) {
  const std::vector<double> v = coalition_values(model, x, groups, background);
  constexpr std::size_t n = kGroupCount;

  // |S|! (n - |S| - 1)! / n!
  std::array<double, n> weight{};
  const auto factorial = [](std::size_t k) {
    double f = 1.0;
    for (std::size_t i = 2; i <= k; ++i) f *= static_cast<double>(i);
    return f;
  };
  for (std::size_t s = 0; s < n; ++s) {
    weight[s] = factorial(s) * factorial(n - s - 1) / factorial(n);
  }

  GroupShapley out;
  for (std::size_t g = 0; g < n; ++g) {
    const std::size_t bit = std::size_t{1} << g;
    double phi = 0.0;
    for (std::size_t mask = 0; mask < v.size(); ++mask) {
      if (mask & bit) continue;
      const double marginal = v[mask | bit] - v[mask];
      phi += weight[static_cast<std::size_t>(std::popcount(mask))] * marginal;
    }
    out.phi[g] = phi;
  }
  out.baseline = v.front();
  out.prediction = v.back();
  return out;
}

GroupShapley shapley_groups(const TrainedModel& model, const FeatureVector& x,
                            const Background& background) {
  if (model.layout_fingerprint != 0 &&
      x.layout_fingerprint != model.layout_fingerprint) {
    throw LayoutMismatch("feature layout fingerprint does not match the model");
  }
  if (background.layout_fingerprint != 0 &&
      background.layout_fingerprint != x.layout_fingerprint) {
    throw LayoutMismatch("background was built for another layout");
  }
  return shapley_groups(model, std::span<const double>(x.values), x.group_map,
                        background);
}

GroupAttribution normalize_attribution(const GroupAttribution& phi) {
  double total = 0.0;
  for (double v : phi) total += std::abs(v);
  GroupAttribution out{};
  if (total == 0.0) return out;
  for (std::size_t g = 0; g < phi.size(); ++g) out[g] = phi[g] / total;
  return out;
}

HorizonAttribution attribute_horizon(const TrainedModel& model,
                                     std::span<const FeatureVector> rows,
                                     const Background& background) {
  HorizonAttribution out;
  out.raw.reserve(rows.size());
  out.normalized.reserve(rows.size());
  for (const FeatureVector& row : rows) {
    out.raw.push_back(shapley_groups(model, row, background));
    out.normalized.push_back(normalize_attribution(out.raw.back().phi));
  }
  return out;
}

}  // namespace promocast
