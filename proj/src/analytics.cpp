#include "promocast/analytics.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <set>

#include "promocast/error.hpp"
#include "promocast/features.hpp"
#include "promocast/rng.hpp"

namespace promocast {

double quantile(std::span<const double> values, double q) {
  if (values.empty()) throw InvalidArgument("quantile of an empty sample");
  std::vector<double> sorted(values.begin(), values.end());
  std::sort(sorted.begin(), sorted.end());
  const double pos = q * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  return sorted[lo] + (pos - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

double pearson(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size() || a.empty()) {
    throw InvalidArgument("correlation needs equally sized, nonempty inputs");
  }
  const auto n = static_cast<double>(a.size());
  double ma = 0.0, mb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    ma += a[i];
    mb += b[i];
  }
  ma /= n;
  mb /= n;
  double sab = 0.0, saa = 0.0, sbb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    sab += (a[i] - ma) * (b[i] - mb);
    saa += (a[i] - ma) * (a[i] - ma);
    sbb += (b[i] - mb) * (b[i] - mb);
  }
  // Relative guard: sums of squares from rounding noise count as zero.
  const double scale_a = std::max(1.0, ma * ma) * n;
  const double scale_b = std::max(1.0, mb * mb) * n;
  if (saa <= 1e-24 * scale_a || sbb <= 1e-24 * scale_b) return 0.0;
  return std::clamp(sab / std::sqrt(saa * sbb), -1.0, 1.0);
}

double season_signal(Date day) {
  return std::cos(2.0 * std::numbers::pi *
                  (static_cast<double>(day.day_of_year()) - 182.0) / 365.25);
}

ProductStats product_stats(const SalesSeries& sales,
                           std::span<const PromotionRecord> promotions,
                           double base_price, const RewardRates& rates) {
  if (sales.days.size() < kMinStatsDays) {
    throw InvalidArgument("product '" + sales.product_id + "' has " +
                          std::to_string(sales.days.size()) + " sales days, need " +
                          std::to_string(kMinStatsDays));
  }
  const std::size_t n = sales.days.size();
  std::vector<double> units(n), price(n), promo(n), season(n);
  for (std::size_t i = 0; i < n; ++i) {
    const SalesDay& d = sales.days[i];
    units[i] = static_cast<double>(d.units_sold);
    price[i] = d.price.to_double();
    promo[i] = promotion_strength(promotions, d.date, base_price, rates);
    season[i] = season_signal(d.date);
  }
  ProductStats s;
  s.median = quantile(units, 0.5);
  s.iqr = quantile(units, 0.75) - quantile(units, 0.25);
  double mean = 0.0;
  for (double u : units) mean += u;
  mean /= static_cast<double>(n);
  double var = 0.0;
  for (double u : units) var += (u - mean) * (u - mean);
  s.std = std::sqrt(var / static_cast<double>(n));
  s.corr_price = pearson(units, price);
  s.corr_promo = pearson(units, promo);
  s.corr_season = pearson(units, season);
  return s;
}

std::vector<double> robust_normalize(std::span<const double> values) {
  std::vector<double> out(values.size());
  if (values.empty()) return out;
  const double median = quantile(values, 0.5);
  double iqr = quantile(values, 0.75) - quantile(values, 0.25);
  if (iqr == 0.0) iqr = 1.0;
  for (std::size_t i = 0; i < values.size(); ++i) {
    const double z = std::clamp((values[i] - median) / iqr, -2.0, 2.0);
    out[i] = (z + 2.0) / 4.0;
  }
  return out;
}

std::vector<StatsVector> normalize_stats(std::span<const ProductStats> stats) {
  std::vector<StatsVector> out(stats.size());
  for (std::size_t i = 0; i < stats.size(); ++i) out[i] = stats[i].as_array();
  for (std::size_t dim = 0; dim < 3; ++dim) {
    std::vector<double> column(stats.size());
    for (std::size_t i = 0; i < stats.size(); ++i) column[i] = out[i][dim];
    const std::vector<double> scaled = robust_normalize(column);
    for (std::size_t i = 0; i < stats.size(); ++i) out[i][dim] = scaled[i];
  }
  return out;
}

CompetitorList top_competitors(const StatsEntry& target,
                               std::span<const StatsEntry> all, std::size_t k) {
  if (k == 0) throw InvalidArgument("k must be at least 1");
  std::vector<std::pair<double, const StatsEntry*>> candidates;
  for (const StatsEntry& e : all) {
    if (e.product_id == target.product_id || e.category != target.category) continue;
    double sq = 0.0;
    for (std::size_t d = 0; d < e.normalized.size(); ++d) {
      const double diff = e.normalized[d] - target.normalized[d];
      sq += diff * diff;
    }
    candidates.emplace_back(std::sqrt(sq), &e);
  }
  std::sort(candidates.begin(), candidates.end(), [](const auto& a, const auto& b) {
    if (a.first != b.first) return a.first < b.first;
    return a.second->product_id < b.second->product_id;
  });
  CompetitorList out;
  out.short_list = candidates.size() < k;
  const std::size_t take = std::min(k, candidates.size());
  for (std::size_t i = 0; i < take; ++i) {
    out.ids.push_back(candidates[i].second->product_id);
    out.distances.push_back(candidates[i].first);
  }
  return out;
}

std::vector<std::array<double, 2>> pca_2d(const Matrix& points) {
  const auto n = static_cast<Eigen::Index>(points.rows);
  const auto d = static_cast<Eigen::Index>(points.cols);
  std::vector<std::array<double, 2>> out(points.rows, {0.0, 0.0});
  if (n == 0 || d == 0) return out;
  Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>
      X(points.data.data(), n, d);
  const Eigen::MatrixXd centered = X.rowwise() - X.colwise().mean();
  const Eigen::MatrixXd cov = centered.transpose() * centered;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(cov);
  // Eigenvalues come out ascending.
  for (int c = 0; c < 2 && c < d; ++c) {
    Eigen::VectorXd axis = solver.eigenvectors().col(d - 1 - c);
    Eigen::Index arg = 0;
    axis.cwiseAbs().maxCoeff(&arg);
    if (axis(arg) < 0) axis = -axis;
    const Eigen::VectorXd proj = centered * axis;
    for (Eigen::Index i = 0; i < n; ++i) out[static_cast<std::size_t>(i)][static_cast<std::size_t>(c)] = proj(i);
  }
  return out;
}

namespace {

// Conditional affinities with per-row bandwidth matched to the perplexity,
// symmetrized and normalized to sum to one.
std::vector<double> joint_affinities(const Matrix& points, double perplexity) {
  const std::size_t n = points.rows;
  std::vector<double> dist(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      double s = 0.0;
      for (std::size_t k = 0; k < points.cols; ++k) {
        const double diff = points(i, k) - points(j, k);
        s += diff * diff;
      }
      dist[i * n + j] = dist[j * n + i] = s;
    }
  }
  std::vector<double> cond(n * n, 0.0);
  const double target = std::log(perplexity);
  for (std::size_t i = 0; i < n; ++i) {
    double beta = 1.0, lo = -1.0, hi = -1.0;  // negative = unbounded
    double* row = cond.data() + i * n;
    for (int iter = 0; iter < 200; ++iter) {
      double sum = 0.0;
      for (std::size_t j = 0; j < n; ++j) {
        row[j] = j == i ? 0.0 : std::exp(-beta * dist[i * n + j]);
        sum += row[j];
      }
      if (sum <= 0.0) sum = 1e-300;
      double entropy = 0.0;
      for (std::size_t j = 0; j < n; ++j) {
        row[j] /= sum;
        if (row[j] > 1e-300) entropy -= row[j] * std::log(row[j]);
      }
      const double diff = entropy - target;
      if (std::abs(diff) < 1e-5) break;
      if (diff > 0) {  // too flat: sharpen
        lo = beta;
        beta = hi < 0 ? beta * 2.0 : (beta + hi) / 2.0;
      } else {
        hi = beta;
        beta = lo < 0 ? beta / 2.0 : (beta + lo) / 2.0;
      }
    }
  }
  std::vector<double> p(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (i == j) continue;
      p[i * n + j] =
          std::max((cond[i * n + j] + cond[j * n + i]) / (2.0 * static_cast<double>(n)), 1e-12);
    }
  }
  return p;
}

double kl_divergence(const std::vector<double>& p,
                     const std::vector<std::array<double, 2>>& y) {
  const std::size_t n = y.size();
  std::vector<double> num(n * n, 0.0);
  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const double dx = y[i][0] - y[j][0];
      const double dy = y[i][1] - y[j][1];
      const double q = 1.0 / (1.0 + dx * dx + dy * dy);
      num[i * n + j] = num[j * n + i] = q;
      total += 2.0 * q;
    }
  }
  double kl = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (i == j) continue;
      const double q = std::max(num[i * n + j] / total, 1e-300);
      kl += p[i * n + j] * std::log(p[i * n + j] / q);
    }
  }
  return kl;
}

}  // namespace

Projection2D project_products(const Matrix& points, const TsneOptions& options) {
  Projection2D out;
  out.seed = options.seed;
  out.perplexity = options.perplexity;
  const std::size_t n = points.rows;
  if (!(options.perplexity > 0.0)) throw InvalidArgument("perplexity must be positive");
  for (double v : points.data) {
    if (!std::isfinite(v)) throw InvalidArgument("non-finite projection input");
  }
  if (static_cast<double>(n) < 3.0 * options.perplexity) {
    out.pca_fallback = true;
    out.coords = pca_2d(points);
    return out;
  }

  const std::vector<double> p = joint_affinities(points, options.perplexity);
  Rng rng(options.seed);
  std::vector<std::array<double, 2>> y(n);
  for (auto& pt : y) pt = {rng.normal() * 1e-4, rng.normal() * 1e-4};
  out.initial_kl = kl_divergence(p, y);

  std::vector<std::array<double, 2>> velocity(n, {0.0, 0.0});
  std::vector<std::array<double, 2>> gains(n, {1.0, 1.0});
  std::vector<std::array<double, 2>> grad(n);
  std::vector<double> num(n * n);
  for (std::size_t iter = 0; iter < options.iterations; ++iter) {
    const bool exaggerate = iter < options.exaggeration_iterations;
    const double exaggeration = exaggerate ? options.early_exaggeration : 1.0;
    const double momentum = exaggerate ? 0.5 : 0.8;

    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      num[i * n + i] = 0.0;
      for (std::size_t j = i + 1; j < n; ++j) {
        const double dx = y[i][0] - y[j][0];
        const double dy = y[i][1] - y[j][1];
        const double q = 1.0 / (1.0 + dx * dx + dy * dy);
        num[i * n + j] = num[j * n + i] = q;
        total += 2.0 * q;
      }
    }
    for (std::size_t i = 0; i < n; ++i) {
      double gx = 0.0, gy = 0.0;
      for (std::size_t j = 0; j < n; ++j) {
        if (i == j) continue;
        const double w = (exaggeration * p[i * n + j] - num[i * n + j] / total) * num[i * n + j];
        gx += w * (y[i][0] - y[j][0]);
        gy += w * (y[i][1] - y[j][1]);
      }
      grad[i] = {4.0 * gx, 4.0 * gy};
    }
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t k = 0; k < 2; ++k) {
        double& g = gains[i][k];
        g = (grad[i][k] > 0) != (velocity[i][k] > 0) ? g + 0.2 : g * 0.8;
        g = std::max(g, 0.01);
        velocity[i][k] = momentum * velocity[i][k] - options.learning_rate * g * grad[i][k];
        y[i][k] += velocity[i][k];
      }
    }
    std::array<double, 2> mean{0.0, 0.0};
    for (const auto& pt : y) {
      mean[0] += pt[0];
      mean[1] += pt[1];
    }
    for (auto& pt : y) {
      pt[0] -= mean[0] / static_cast<double>(n);
      pt[1] -= mean[1] / static_cast<double>(n);
    }
  }
  out.final_kl = kl_divergence(p, y);
  out.coords = std::move(y);
  return out;
}

double growth_rate(double previous, double current) {
  if (previous == 0.0) {
    throw UndefinedGrowth("growth rate undefined: previous-day sales are zero");
  }
  return (current - previous) / previous;
}

double growth_rate(const SalesSeries& series, Date promo_start) {
  const auto today = series.index_of(promo_start);
  const auto yesterday = series.index_of(promo_start - 1);
  if (!today || !yesterday) {
    throw InvalidArgument("growth rate needs sales on " + (promo_start - 1).to_string() +
                          " and " + promo_start.to_string());
  }
  return growth_rate(static_cast<double>(series.days[*yesterday].units_sold),
                     static_cast<double>(series.days[*today].units_sold));
}

std::vector<std::pair<std::string, double>> word_cloud_weights(
    std::span<const Product> products, std::span<const SalesSeries> sales) {
  std::map<std::string, std::pair<double, std::size_t>> acc;
  for (const Product& p : products) {
    const SalesSeries* series = nullptr;
    for (const SalesSeries& s : sales) {
      if (s.product_id == p.id) series = &s;
    }
    if (!series || series->days.empty()) continue;
    double mean = 0.0;
    for (const SalesDay& d : series->days) mean += static_cast<double>(d.units_sold);
    mean /= static_cast<double>(series->days.size());
    const std::vector<std::string> tokens = tokenize_title(p.title);
    for (const std::string& w : std::set<std::string>(tokens.begin(), tokens.end())) {
      auto& [sum, count] = acc[w];
      sum += mean;
      ++count;
    }
  }
  std::vector<std::pair<std::string, double>> out;
  for (const auto& [word, sc] : acc) {
    out.emplace_back(word, sc.first / static_cast<double>(sc.second));
  }
  std::stable_sort(out.begin(), out.end(), [](const auto& a, const auto& b) {
    return a.second > b.second;
  });
  return out;
}

}  // namespace promocast
