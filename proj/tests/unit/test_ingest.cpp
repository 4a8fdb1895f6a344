#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <random>

#include <unistd.h>

#include "promocast/error.hpp"
#include "promocast/ingest.hpp"
#include "promocast/json_io.hpp"
#include "promocast/rng.hpp"

using namespace promocast;
namespace fs = std::filesystem;

namespace {

const fs::path kFixture = fs::path(PROMOCAST_SOURCE_DIR) / "tests/fixtures/two_products";

class TempDir {
 public:
  TempDir() {
    static int counter = 0;
    path_ = fs::temp_directory_path() /
            ("promocast_ingest_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
    fs::remove_all(path_);
    fs::create_directories(path_);
  }
  ~TempDir() { fs::remove_all(path_); }
  const fs::path& path() const { return path_; }

 private:
  fs::path path_;
};

void copy_fixture(const fs::path& to) {
  for (const auto& f : fs::directory_iterator(kFixture)) fs::copy(f.path(), to / f.path().filename());
}

TrainedModel small_forest() {
  Rng rng(5);
  Matrix X(0, 3);
  std::vector<double> y;
  for (int i = 0; i < 80; ++i) {
    std::vector<double> row{rng.uniform(), rng.uniform(), rng.uniform()};
    y.push_back(3 * row[0] - row[1] + rng.normal(0, 0.1));
    X.append_row(row);
  }
  TrainingConfig cfg = TrainingConfig::defaults(ModelKind::RandomForest);
  cfg.forest.n_trees = 12;
  return train(ModelKind::RandomForest, X, y, cfg, 99);
}

}  // namespace

TEST(LoadDataset, TwoProductFixture) {
  const LoadedDataset loaded = load_dataset(kFixture, DatasetFormat::CsvDir);
  const Dataset& ds = loaded.dataset;
  EXPECT_EQ(ds.products.size(), 2u);
  EXPECT_EQ(ds.sales.size(), 2u);
  EXPECT_GE(ds.promotions.size(), 1u);
  EXPECT_EQ(ds.products[1].title, "Trail shoe, waterproof");
  // The BOGO line is not a known promotion: skipped with a warning.
  ASSERT_EQ(loaded.warnings.size(), 1u);
  EXPECT_NE(loaded.warnings[0].find("pr3"), std::string::npos);
  // Missing price inherits the previous day.
  const SalesSeries* p2 = ds.find_series("p2");
  ASSERT_NE(p2, nullptr);
  EXPECT_EQ(p2->days[5].price, Money::from_cents(12000));
  EXPECT_DOUBLE_EQ(ds.promotions[0].k_d, 10.0 / 69.0);
}

TEST(LoadDataset, MalformedDateNamesRow) {
  TempDir dir;
  copy_fixture(dir.path());
  std::string sales;
  {
    std::ifstream in(dir.path() / "sales.csv");
    sales.assign(std::istreambuf_iterator<char>(in), {});
  }
  const auto pos = sales.find("2021-01-03");
  sales.replace(pos, 10, "2021-13-01");
  { std::ofstream(dir.path() / "sales.csv") << sales; }
  try {
    load_dataset(dir.path(), DatasetFormat::CsvDir);
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 4u);
    EXPECT_NE(std::string(e.what()).find("sales.csv"), std::string::npos);
  }
}

TEST(LoadDataset, DuplicateIdInJson) {
  TempDir dir;
  Dataset ds = load_dataset(kFixture, DatasetFormat::CsvDir).dataset;
  save_dataset(ds, dir.path() / "ds.json", DatasetFormat::Json);
  json doc = json::parse(read_file(dir.path() / "ds.json"));
  doc["products"].push_back(doc["products"][0]);
  write_file(dir.path() / "dup.json", doc.dump());
  try {
    load_dataset(dir.path() / "dup.json", DatasetFormat::Json);
    FAIL() << "expected DatasetInvalid";
  } catch (const DatasetInvalid& e) {
    bool found = false;
    for (const Violation& v : e.report().violations) {
      found |= v.message.find("duplicate id") != std::string::npos;
    }
    EXPECT_TRUE(found);
  }
}

TEST(LoadDataset, JsonAndCsvRoundTrip) {
  TempDir dir;
  const Dataset ds = load_dataset(kFixture, DatasetFormat::CsvDir).dataset;
  save_dataset(ds, dir.path() / "csv", DatasetFormat::CsvDir);
  save_dataset(ds, dir.path() / "ds.json", DatasetFormat::Json);
  EXPECT_EQ(load_dataset(dir.path() / "csv", DatasetFormat::CsvDir).dataset, ds);
  EXPECT_EQ(load_dataset(dir.path() / "ds.json", DatasetFormat::Json).dataset, ds);
  EXPECT_EQ(dataset_fingerprint(load_dataset(dir.path() / "ds.json", DatasetFormat::Json).dataset),
            dataset_fingerprint(ds));
}

TEST(Csv, QuotingAndErrors) {
  const CsvTable t = parse_csv("a,b\n\"x, y\",\"he said \"\"hi\"\"\"\n1,2\n");
  ASSERT_EQ(t.rows.size(), 2u);
  EXPECT_EQ(t.rows[0][0], "x, y");
  EXPECT_EQ(t.rows[0][1], "he said \"hi\"");
  EXPECT_EQ(parse_csv(write_csv(t)).rows, t.rows);
  EXPECT_THROW(parse_csv("a,b\n1,2,3\n"), ParseError);
  EXPECT_THROW(parse_csv("a,b\n\"open,2\n"), ParseError);
}

TEST(ModelFile, RoundTripPredictsIdentically) {
  TempDir dir;
  const TrainedModel model = small_forest();
  save_model(model, dir.path() / "m.model");
  const TrainedModel back = load_model(dir.path() / "m.model");
  Rng rng(8);
  for (int i = 0; i < 10; ++i) {
    const std::vector<double> x{rng.uniform(), rng.uniform(), rng.uniform()};
    EXPECT_EQ(predict(back, x), predict(model, x));
  }
  EXPECT_EQ(back.trees, model.trees);
}

TEST(ModelFile, TruncatedIsCorrupt) {
  const std::string bytes = serialize_model(small_forest());
  EXPECT_THROW(deserialize_model(bytes.substr(0, bytes.size() / 2)), CorruptFile);
  std::string flipped = bytes;
  flipped[flipped.size() - 5] ^= 0x01;
  EXPECT_THROW(deserialize_model(flipped), CorruptFile);
  EXPECT_THROW(deserialize_model(""), CorruptFile);
}

TEST(ModelFile, NewerVersionNamesBoth) {
  std::string bytes = serialize_model(small_forest());
  bytes.replace(bytes.find(" 1 "), 3, " 7 ");
  try {
    deserialize_model(bytes);
    FAIL() << "expected VersionError";
  } catch (const VersionError& e) {
    const std::string msg = e.what();
    EXPECT_NE(msg.find('7'), std::string::npos);
    EXPECT_NE(msg.find(std::to_string(kModelFormatVersion)), std::string::npos);
  }
}

TEST(Synthetic, ConstantWhenModifiersOff) {
  SyntheticConfig c;
  c.n_products = 3;
  c.n_days = 60;
  c.noise_sd = 0;
  c.price_elasticity = 0;
  c.season_amplitude = 0;
  c.promotions_per_year = 0;
  c.demand_spread = 0;
  c.base_demand = 41.6;
  const SyntheticDataset s = generate_synthetic(c);
  EXPECT_TRUE(s.dataset.promotions.empty());
  for (const SalesSeries& series : s.dataset.sales) {
    for (const SalesDay& d : series.days) EXPECT_EQ(d.units_sold, 42);
  }
}

TEST(Synthetic, Deterministic) {
  TempDir dir;
  SyntheticConfig c;
  c.n_products = 4;
  c.n_days = 120;
  const SyntheticDataset a = generate_synthetic(c);
  const SyntheticDataset b = generate_synthetic(c);
  EXPECT_EQ(a.dataset, b.dataset);
  save_dataset(a.dataset, dir.path() / "a.json", DatasetFormat::Json);
  save_dataset(b.dataset, dir.path() / "b.json", DatasetFormat::Json);
  EXPECT_EQ(read_file(dir.path() / "a.json"), read_file(dir.path() / "b.json"));
  c.seed = 8;
  EXPECT_NE(generate_synthetic(c).dataset, a.dataset);
  EXPECT_TRUE(validate_dataset(a.dataset).ok);
}

TEST(Synthetic, PromotionLiftRatio) {
  // A 20% discount lifts demand by 1 + 1.0 * 0.2; measure it on the data.
  SyntheticConfig c;
  c.n_products = 4;
  c.n_days = 730;
  c.noise_sd = 2;
  c.price_elasticity = 0;
  c.season_amplitude = 0;
  c.demand_spread = 0;
  c.promo_lift = 1.0;
  c.promotions_per_year = 30;
  c.fixed_promotion_text = "20% Off";
  const SyntheticDataset s = generate_synthetic(c);
  double promo_sum = 0, plain_sum = 0;
  std::size_t promo_n = 0, plain_n = 0;
  const auto& truth = s.ground_truth;
  std::size_t t = 0;
  for (const SalesSeries& series : s.dataset.sales) {
    for (const SalesDay& d : series.days) {
      const GroundTruthDay& g = truth[t++];
      ASSERT_EQ(g.date, d.date);
      if (g.lift > 1.0) {
        promo_sum += static_cast<double>(d.units_sold);
        ++promo_n;
      } else {
        plain_sum += static_cast<double>(d.units_sold);
        ++plain_n;
      }
    }
  }
  ASSERT_GE(promo_n, 200u);
  ASSERT_GE(plain_n, 200u);
  const double ratio = (promo_sum / promo_n) / (plain_sum / plain_n);
  EXPECT_GE(ratio, 1.15);
  EXPECT_LE(ratio, 1.25);
}

TEST(Synthetic, RejectsBadConfig) {
  SyntheticConfig c;
  c.noise_sd = -1;
  EXPECT_THROW(generate_synthetic(c), InvalidArgument);
}
