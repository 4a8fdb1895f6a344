#include <gtest/gtest.h>

#include <cmath>

#include "oracles.hpp"
#include "promocast/analytics.hpp"
#include "promocast/error.hpp"

using namespace promocast;

namespace {

SalesSeries series_of(const std::vector<std::int64_t>& units, std::vector<double> prices = {}) {
  SalesSeries s{"p", {}};
  const Date d0 = Date::from_ymd(2021, 6, 1);
  for (std::size_t i = 0; i < units.size(); ++i) {
    const double price = prices.empty() ? 10.0 : prices[i];
    s.days.push_back({d0 + static_cast<std::int32_t>(i), units[i], Money::from_double(price)});
  }
  return s;
}

std::vector<StatsEntry> random_entries(Rng& rng, std::size_t n, int categories) {
  std::vector<StatsEntry> out;
  for (std::size_t i = 0; i < n; ++i) {
    StatsEntry e;
    e.product_id = "P" + std::to_string(1000 + i);
    e.category = "c" + std::to_string(rng.uniform_int(0, categories - 1));
    for (double& v : e.normalized) v = rng.uniform();
    out.push_back(e);
  }
  return out;
}

}  // namespace

TEST(Quantile, LinearInterpolation) {
  const std::vector<double> v{8, 1, 7, 2, 6, 3, 5, 4};
  EXPECT_DOUBLE_EQ(quantile(v, 0.5), 4.5);
  EXPECT_DOUBLE_EQ(quantile(v, 0.75) - quantile(v, 0.25), 3.5);
  EXPECT_EQ(quantile(v, 0.0), 1.0);
  EXPECT_EQ(quantile(v, 1.0), 8.0);
  EXPECT_THROW(quantile(std::vector<double>{}, 0.5), InvalidArgument);
}

TEST(ProductStats, Examples) {
  const ProductStats flat = product_stats(series_of({5, 5, 5, 5, 5, 5, 5, 5, 5, 5}), {}, 10.0);
  EXPECT_EQ(flat.std, 0.0);
  EXPECT_EQ(flat.iqr, 0.0);
  EXPECT_EQ(flat.corr_price, 0.0);
  EXPECT_EQ(flat.corr_promo, 0.0);
  EXPECT_EQ(flat.corr_season, 0.0);

  const ProductStats eight = product_stats(series_of({1, 2, 3, 4, 5, 6, 7, 8}), {}, 10.0);
  EXPECT_DOUBLE_EQ(eight.median, 4.5);
  EXPECT_DOUBLE_EQ(eight.iqr, 3.5);

  std::vector<std::int64_t> units;
  std::vector<double> prices;
  for (int i = 0; i < 20; ++i) {
    prices.push_back(10.0 + i);
    units.push_back(100 - 3 * i);
  }
  EXPECT_NEAR(product_stats(series_of(units, prices), {}, 10.0).corr_price, -1.0, 1e-12);
  EXPECT_THROW(product_stats(series_of({1, 2, 3}), {}, 10.0), InvalidArgument);
}

TEST(ProductStats, PromotionCorrelation) {
  std::vector<std::int64_t> units(30, 10);
  for (int i = 10; i < 15; ++i) units[static_cast<std::size_t>(i)] = 14;
  const SalesSeries s = series_of(units);
  const std::vector<PromotionRecord> promos{
      make_promotion("a", "p", "20% Off", s.days[10].date, s.days[14].date)};
  EXPECT_NEAR(product_stats(s, promos, 10.0).corr_promo, 1.0, 1e-12);
}

TEST(Season, Carrier) {
  EXPECT_NEAR(season_signal(Date::from_ymd(2021, 7, 1)), 1.0, 1e-3);
  EXPECT_LT(season_signal(Date::from_ymd(2021, 1, 1)), -0.99);
}

TEST(RobustNormalize, Examples) {
  for (double v : robust_normalize(std::vector<double>{3, 3, 3, 3})) EXPECT_EQ(v, 0.5);
  const std::vector<double> with_outlier{9, 10, 11, 10, 9.5, 10.5, 1000};
  EXPECT_EQ(robust_normalize(with_outlier).back(), 1.0);
  const std::vector<double> sym{1, 2, 3, 4, 5};
  const std::vector<double> n = robust_normalize(sym);
  for (std::size_t i = 0; i < n.size(); ++i) {
    EXPECT_NEAR(n[i] + n[n.size() - 1 - i], 1.0, 1e-12);
    const double z = std::clamp((sym[i] - 3.0) / 2.0, -2.0, 2.0);
    EXPECT_DOUBLE_EQ(n[i], (z + 2.0) / 4.0);
  }
}

TEST(Competitors, SortAndIdentity) {
  StatsEntry target{"t", "c", {0, 0, 0, 0, 0, 0}};
  const std::vector<StatsEntry> all{target,
                                    {"a", "c", {3, 0, 0, 0, 0, 0}},
                                    {"b", "c", {1, 0, 0, 0, 0, 0}},
                                    {"d", "c", {2, 0, 0, 0, 0, 0}},
                                    {"x", "other", {0, 0, 0, 0, 0, 0}}};
  const CompetitorList two = top_competitors(target, all, 2);
  EXPECT_EQ(two.ids, (std::vector<std::string>{"b", "d"}));
  EXPECT_EQ(two.distances, (std::vector<double>{1.0, 2.0}));
  EXPECT_FALSE(two.short_list);

  std::vector<StatsEntry> with_twin = all;
  with_twin.push_back({"twin", "c", {0, 0, 0, 0, 0, 0}});
  const CompetitorList twin = top_competitors(target, with_twin, 1);
  EXPECT_EQ(twin.ids.front(), "twin");
  EXPECT_EQ(twin.distances.front(), 0.0);

  const CompetitorList many = top_competitors(target, all, 10);
  EXPECT_EQ(many.ids.size(), 3u);
  EXPECT_TRUE(many.short_list);
}

TEST(Competitors, MatchesBruteForce) {
  Rng rng(77);
  for (int trial = 0; trial < 20; ++trial) {
    const std::vector<StatsEntry> all = random_entries(rng, 50, 2);
    const StatsEntry& target = all[static_cast<std::size_t>(rng.uniform_int(0, 49))];
    EXPECT_EQ(top_competitors(target, all, 5).ids, oracle::brute_force_competitors(target, all, 5));
  }
}

TEST(Projection, TwoClustersSeparate) {
  std::vector<int> labels;
  const Matrix points = oracle::two_clusters(30, 6, 5, labels);
  TsneOptions opt;
  opt.perplexity = 10;
  const Projection2D p = project_products(points, opt);
  EXPECT_FALSE(p.pca_fallback);
  EXPECT_GE(oracle::nearest_neighbor_purity(p.coords, labels), 0.9);
  EXPECT_LE(p.final_kl, p.initial_kl);
}

TEST(Projection, DeterministicPerSeed) {
  std::vector<int> labels;
  const Matrix points = oracle::two_clusters(15, 4, 6, labels);
  TsneOptions opt;
  opt.perplexity = 5;
  opt.iterations = 300;
  const Projection2D a = project_products(points, opt);
  const Projection2D b = project_products(points, opt);
  EXPECT_EQ(a.coords, b.coords);
  opt.seed = 2;
  EXPECT_NE(project_products(points, opt).coords, a.coords);
}

TEST(Projection, FallsBackToPca) {
  Matrix four(0, 3);
  four.append_row(std::vector<double>{0, 0, 0});
  four.append_row(std::vector<double>{1, 0, 0});
  four.append_row(std::vector<double>{0, 2, 0});
  four.append_row(std::vector<double>{0, 0, 3});
  const Projection2D p = project_products(four, {});
  EXPECT_TRUE(p.pca_fallback);
  EXPECT_EQ(p.coords.size(), 4u);
}

TEST(GrowthRate, Examples) {
  EXPECT_DOUBLE_EQ(growth_rate(100.0, 120.0), 0.2);
  EXPECT_EQ(growth_rate(50.0, 50.0), 0.0);
  EXPECT_THROW(growth_rate(0.0, 10.0), UndefinedGrowth);
  const SalesSeries s = series_of({100, 120, 0, 30});
  EXPECT_DOUBLE_EQ(growth_rate(s, s.days[1].date), 0.2);
  EXPECT_THROW(growth_rate(s, s.days[3].date), UndefinedGrowth);
  EXPECT_THROW(growth_rate(s, s.days[0].date), InvalidArgument);
}

TEST(WordCloud, Examples) {
  const std::vector<Product> one{{"a", "shoe", "c", "b", "s", Money::from_cents(100)}};
  const std::vector<SalesSeries> one_sales{series_of({10, 10})};
  std::vector<SalesSeries> s1 = one_sales;
  s1[0].product_id = "a";
  const auto w1 = word_cloud_weights(one, s1);
  ASSERT_EQ(w1.size(), 1u);
  EXPECT_EQ(w1[0], (std::pair<std::string, double>{"shoe", 10.0}));

  const std::vector<Product> two{{"a", "red shoe", "c", "b", "s", Money::from_cents(100)},
                                 {"b", "blue shoe", "c", "b", "s", Money::from_cents(100)}};
  std::vector<SalesSeries> s2{series_of({10, 10}), series_of({20, 20})};
  s2[0].product_id = "a";
  s2[1].product_id = "b";
  const auto w2 = word_cloud_weights(two, s2);
  auto find = [&](const std::string& w) {
    for (const auto& [word, weight] : w2) {
      if (word == w) return weight;
    }
    return -1.0;
  };
  EXPECT_EQ(find("shoe"), 15.0);
  EXPECT_EQ(find("blue"), 20.0);
  EXPECT_EQ(find("green"), -1.0);
  EXPECT_EQ(w2.front().first, "blue");
}
