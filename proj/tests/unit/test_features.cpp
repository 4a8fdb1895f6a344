#include <gtest/gtest.h>

#include <fstream>
#include <set>
#include <sstream>

#include "promocast/error.hpp"
#include "promocast/features.hpp"
#include "promocast/json_io.hpp"

using namespace promocast;

namespace {

SalesSeries constant_series(const std::string& id, Date start, int days, std::int64_t units) {
  SalesSeries s{id, {}};
  for (int i = 0; i < days; ++i) s.days.push_back({start + i, units, Money::from_cents(1000)});
  return s;
}

const Product kShoe{"p1", "Running shoe men", "shoes", "acme", "main", Money::from_cents(10000)};

}  // namespace

TEST(Codebook, Examples) {
  const std::vector<std::string> a{"running shoe", "shoe men"};
  EXPECT_EQ(build_codebook(a).words(), (std::vector<std::string>{"running", "shoe", "men"}));
  const std::vector<std::string> b{"A a A"};
  EXPECT_EQ(build_codebook(b).words(), (std::vector<std::string>{"a"}));
  const std::vector<std::string> c{""};
  EXPECT_THROW(build_codebook(c), InvalidArgument);
}

TEST(EncodeTitle, Membership) {
  const Codebook cb({"running", "shoe", "men"});
  EXPECT_EQ(encode_title("running shoe", cb), (std::vector<std::uint8_t>{1, 1, 0}));
  EXPECT_EQ(encode_title("", cb), (std::vector<std::uint8_t>{0, 0, 0}));
  EXPECT_EQ(encode_title("velvet hat", cb), (std::vector<std::uint8_t>{0, 0, 0}));
}

TEST(EmbedTitle, LinearAndDeterministic) {
  const Codebook cb({"running", "shoe", "men", "trail"});
  const TitleEmbedder emb(cb, 17);
  const std::vector<std::uint8_t> zero(4, 0), e1{1, 0, 0, 0}, e2{0, 0, 1, 0}, both{1, 0, 1, 0};
  for (double v : embed_title(zero, emb)) EXPECT_EQ(v, 0.0);
  EXPECT_EQ(embed_title(both, emb), embed_title(both, emb));
  const TitleEmbedding a = embed_title(e1, emb), b = embed_title(e2, emb), ab = embed_title(both, emb);
  for (std::size_t i = 0; i < kTitleDim; ++i) EXPECT_DOUBLE_EQ(ab[i], a[i] + b[i]);
  // Column sums of the projection equal the embedding of one word.
  for (std::size_t i = 0; i < kTitleDim; ++i) EXPECT_EQ(a[i], emb.projection()[i]);
  const std::vector<std::uint8_t> wrong(3, 1);
  EXPECT_THROW(emb.embed(wrong), InvalidArgument);
}

TEST(HistoricalAverages, Examples) {
  const Date d0 = Date::from_ymd(2020, 1, 1);
  const SalesSeries flat = constant_series("p", d0, 400, 10);
  EXPECT_EQ(historical_averages(flat, d0 + 380), (HistoricalAverages{10, 10, 10, 10}));

  SalesSeries two{"p", {{d0, 2, Money::from_cents(100)}, {d0 + 1, 4, Money::from_cents(100)}}};
  const HistoricalAverages h = historical_averages(two, d0 + 2);
  EXPECT_EQ(h.avg_30, 3.0);
  EXPECT_EQ(h.avg_365, 3.0);
  EXPECT_THROW(historical_averages(two, d0), InsufficientHistory);
}

TEST(HistoricalAverages, WindowsCountObservations) {
  std::vector<double> prior;
  for (int i = 1; i <= 400; ++i) prior.push_back(i);
  const HistoricalAverages h = historical_averages(prior);
  EXPECT_DOUBLE_EQ(h.avg_30, (371.0 + 400.0) / 2.0);
  EXPECT_DOUBLE_EQ(h.avg_90, (311.0 + 400.0) / 2.0);
  EXPECT_DOUBLE_EQ(h.avg_182, (219.0 + 400.0) / 2.0);
  EXPECT_DOUBLE_EQ(h.avg_365, (36.0 + 400.0) / 2.0);
}

TEST(Layout, GroupsPartitionSlots) {
  const FeatureLayout& layout = FeatureLayout::standard();
  ASSERT_EQ(layout.size(), FeatureLayout::kSize);
  EXPECT_NO_THROW(check_group_map(layout.group_map(), layout.size()));
  std::set<std::size_t> seen;
  std::size_t total = 0;
  for (const auto& block : layout.group_map()) {
    EXPECT_FALSE(block.empty());
    total += block.size();
    seen.insert(block.begin(), block.end());
  }
  EXPECT_EQ(total, layout.size());
  EXPECT_EQ(seen.size(), layout.size());
  for (std::size_t i = 0; i < layout.size(); ++i) {
    const auto& block = layout.group_map()[static_cast<std::size_t>(layout.slots()[i].group)];
    EXPECT_NE(std::find(block.begin(), block.end(), i), block.end());
  }
}

TEST(Layout, ShippedTableMatches) {
  std::ifstream in(std::string(PROMOCAST_SOURCE_DIR) + "/docs/feature_layout.json");
  ASSERT_TRUE(in.good());
  const json shipped = json::parse(in);
  EXPECT_EQ(shipped, layout_to_json(FeatureLayout::standard()));
}

TEST(AssembleFeatures, NoPromotions) {
  const Date d0 = Date::from_ymd(2021, 1, 1);
  const std::vector<std::string> titles{kShoe.title};
  const Codebook cb = build_codebook(titles);
  const TitleEmbedder emb(cb, 17);
  const SalesSeries s = constant_series("p1", d0, 40, 7);
  const FeatureVector fv = assemble_features(kShoe, d0 + 20, s, {}, {}, emb, cb);
  ASSERT_EQ(fv.values.size(), FeatureLayout::kSize);
  for (std::size_t i = FeatureLayout::kPromotion; i < FeatureLayout::kSize; ++i) {
    EXPECT_EQ(fv.values[i], 0.0) << "slot " << i;
  }
  EXPECT_EQ(fv.values[FeatureLayout::kPrice], 10.0);
  EXPECT_DOUBLE_EQ(fv.values[FeatureLayout::kPriceRatio], 0.1);
  EXPECT_EQ(fv.values[FeatureLayout::kAverages], 7.0);
  EXPECT_EQ(fv.layout_fingerprint, FeatureLayout::standard().fingerprint());
  // Exactly one weekday and one month flag.
  double wd = 0.0, mo = 0.0;
  for (std::size_t i = 0; i < 7; ++i) wd += fv.values[FeatureLayout::kWeekday + i];
  for (std::size_t i = 0; i < 12; ++i) mo += fv.values[FeatureLayout::kMonth + i];
  EXPECT_EQ(wd, 1.0);
  EXPECT_EQ(mo, 1.0);
  EXPECT_EQ(fv.values[FeatureLayout::kMonth + 0], 1.0);
}

TEST(AssembleFeatures, ActivePercentageDiscount) {
  const Date d0 = Date::from_ymd(2021, 1, 1);
  const std::vector<std::string> titles{kShoe.title};
  const Codebook cb = build_codebook(titles);
  const TitleEmbedder emb(cb, 17);
  const SalesSeries s = constant_series("p1", d0, 40, 7);
  const std::vector<PromotionRecord> promos{
      make_promotion("pr", "p1", "20% Off", d0 + 18, d0 + 22)};
  const FeatureVector fv = assemble_features(kShoe, d0 + 20, s, promos, {}, emb, cb);
  const auto kind = PromotionKind::PercentageDiscount;
  EXPECT_EQ(fv.values[FeatureLayout::status_slot(kind)], 2.0);
  EXPECT_DOUBLE_EQ(fv.values[FeatureLayout::value_slot(kind)], 0.20);
  EXPECT_DOUBLE_EQ(fv.values[FeatureLayout::kPromotionStrength], 0.20);
  const FeatureVector pre = assemble_features(kShoe, d0 + 16, s, promos, {}, emb, cb);
  EXPECT_EQ(pre.values[FeatureLayout::status_slot(kind)], 1.0);
  EXPECT_EQ(pre.values[FeatureLayout::kPromotionStrength], 0.0);
  const FeatureVector post = assemble_features(kShoe, d0 + 24, s, promos, {}, emb, cb);
  EXPECT_EQ(post.values[FeatureLayout::status_slot(kind)], 3.0);
}

TEST(AssembleFeatures, CompetitorsUseTrailingSales) {
  const Date d0 = Date::from_ymd(2021, 1, 1);
  const SalesSeries a = constant_series("a", d0, 30, 10);
  SalesSeries b = constant_series("b", d0, 30, 20);
  b.days[20].units_sold = 1000;  // same-day spike must not leak
  const std::vector<const SalesSeries*> comps{&a, &b};
  const CompetitorSnapshot snap = competitor_snapshot(comps, d0 + 20);
  EXPECT_EQ(snap.mean_recent_sales, 15.0);
  EXPECT_EQ(snap.mean_price, 10.0);
  EXPECT_EQ(competitor_snapshot({}, d0).mean_price, 0.0);
}
