#include "promocast/ingest.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <numbers>
#include <sstream>

#include "promocast/hash.hpp"
#include "promocast/json_io.hpp"
#include "promocast/rng.hpp"

namespace promocast {

namespace fs = std::filesystem;

DatasetFormat dataset_format_from_string(std::string_view name) {
  if (name == "csv-dir" || name == "csv") return DatasetFormat::CsvDir;
  if (name == "json") return DatasetFormat::Json;
  throw InvalidArgument("unknown dataset format '" + std::string(name) +
                        "' (expected csv-dir or json)");
}

DatasetInvalid::DatasetInvalid(ValidationReport report)
    : Error([&] {
        std::string msg = "dataset failed validation";
        for (const Violation& v : report.violations) {
          msg += "\n  " + v.locator + ": " + v.rule + ": " + v.message;
        }
        return msg;
      }()),
      report_(std::move(report)) {}

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw NotFound("cannot open '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const fs::path& path, std::string_view bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot write '" + path.string() + "'");
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw Error("write failed for '" + path.string() + "'");
}

// ---------------------------------------------------------------------------
// CSV

CsvTable parse_csv(std::string_view text, const std::string& source) {
  CsvTable table;
  std::vector<std::string> record;
  std::string field;
  std::size_t line = 1;
  std::size_t record_line = 1;
  bool in_quotes = false;
  bool field_started = false;
  std::size_t quote_line = 0;

  auto end_record = [&] {
    record.push_back(std::move(field));
    field.clear();
    const bool blank = record.size() == 1 && record[0].empty() && !field_started;
    if (!blank) {
      if (table.header.empty() && table.rows.empty()) {
        table.header = std::move(record);
      } else {
        if (record.size() != table.header.size()) {
          throw ParseError(source + ": expected " + std::to_string(table.header.size()) +
                               " fields, found " + std::to_string(record.size()),
                           record_line, 0);
        }
        table.rows.push_back(std::move(record));
        table.row_lines.push_back(record_line);
      }
    }
    record.clear();
    field_started = false;
  };

  for (std::size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    if (in_quotes) {
      if (c == '"') {
        if (i + 1 < text.size() && text[i + 1] == '"') {
          field.push_back('"');
          ++i;
        } else {
          in_quotes = false;
        }
      } else {
        if (c == '\n') ++line;
        field.push_back(c);
      }
      continue;
    }
    switch (c) {
      case '"':
        in_quotes = true;
        field_started = true;
        quote_line = line;
        break;
      case ',':
        record.push_back(std::move(field));
        field.clear();
        field_started = true;
        break;
      case '\r':
        break;
      case '\n':
        end_record();
        ++line;
        record_line = line;
        break;
      default:
        field.push_back(c);
        field_started = true;
    }
  }
  if (in_quotes) throw ParseError(source + ": unterminated quoted field", quote_line, 0);
  if (field_started || !field.empty() || !record.empty()) end_record();
  if (table.header.empty()) throw ParseError(source + ": missing header row", 1, 0);
  return table;
}

std::string write_csv(const CsvTable& table) {
  auto emit = [](std::string& out, const std::vector<std::string>& row) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i) out.push_back(',');
      const std::string& f = row[i];
      if (f.find_first_of(",\"\n\r") == std::string::npos) {
        out += f;
        continue;
      }
      out.push_back('"');
      for (char c : f) {
        if (c == '"') out.push_back('"');
        out.push_back(c);
      }
      out.push_back('"');
    }
    out.push_back('\n');
  };
  std::string out;
  emit(out, table.header);
  for (const auto& row : table.rows) emit(out, row);
  return out;
}

namespace {

class Columns {
 public:
  Columns(const CsvTable& table, std::vector<std::string> required, std::string source)
      : source_(std::move(source)) {
    for (const std::string& name : required) {
      auto it = std::find(table.header.begin(), table.header.end(), name);
      if (it == table.header.end()) {
        throw ParseError(source_ + ": missing column '" + name + "'", 1, 0);
      }
      index_[name] = static_cast<std::size_t>(it - table.header.begin());
    }
  }
  std::size_t operator[](const std::string& name) const { return index_.at(name); }
  const std::string& source() const { return source_; }

 private:
  std::string source_;
  std::map<std::string, std::size_t> index_;
};

Date parse_date_field(const std::string& text, std::size_t line, std::size_t column,
                      const std::string& source) {
  try {
    return Date::parse(text);
  } catch (const ParseError& e) {
    throw ParseError(source + ": " + e.what(), line, column);
  }
}

Money parse_money_field(const std::string& text, std::size_t line, std::size_t column,
                        const std::string& source) {
  try {
    return Money::parse(text);
  } catch (const ParseError& e) {
    throw ParseError(source + ": " + e.what(), line, column);
  }
}

std::int64_t parse_int_field(const std::string& text, std::size_t line, std::size_t column,
                             const std::string& source) {
  std::int64_t value = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (text.empty() || ec != std::errc() || ptr != text.data() + text.size()) {
    throw ParseError(source + ": invalid integer '" + text + "'", line, column);
  }
  return value;
}

bool parse_bool_field(const std::string& text, std::size_t line, std::size_t column,
                      const std::string& source) {
  if (text == "true" || text == "1" || text == "TRUE" || text == "True") return true;
  if (text == "false" || text == "0" || text == "FALSE" || text == "False") return false;
  throw ParseError(source + ": invalid boolean '" + text + "'", line, column);
}

struct RawPromotion {
  std::string id;
  std::string product_id;
  std::string raw_text;
  Date start;
  Date end;
  bool enabled = true;
};

struct RawSalesDay {
  std::string product_id;
  Date date;
  std::int64_t units = 0;
  std::optional<Money> price;
};

// Shared tail of both loaders: price inheritance, promotion parsing and
// clipping, validation.
LoadedDataset finish_load(std::vector<Product> products, std::vector<RawSalesDay> raw_sales,
                          std::vector<RawPromotion> raw_promos) {
  LoadedDataset out;
  Dataset& ds = out.dataset;
  ds.products = std::move(products);

  std::map<std::string, std::size_t> series_index;
  std::map<std::string, std::optional<Money>> last_price;
  for (RawSalesDay& r : raw_sales) {
    auto [it, inserted] = series_index.emplace(r.product_id, ds.sales.size());
    if (inserted) ds.sales.push_back({r.product_id, {}});
    std::optional<Money>& last = last_price[r.product_id];
    Money price;
    if (r.price) {
      price = *r.price;
    } else if (last) {
      price = *last;
    } else {
      const Product* p = ds.find_product(r.product_id);
      price = p ? p->base_price : Money();
    }
    last = price;
    ds.sales[it->second].days.push_back({r.date, r.units, price});
  }

  const auto span = ds.span();
  for (RawPromotion& r : raw_promos) {
    PromotionRecord rec;
    try {
      rec = make_promotion(r.id, r.product_id, r.raw_text, r.start, r.end, r.enabled);
    } catch (const UnrecognizedPromotion& e) {
      out.warnings.push_back("skipped promotion '" + r.id + "': " + e.what());
      continue;
    }
    if (span && rec.start <= rec.end) {
      if (rec.end < span->first || rec.start > span->second) {
        out.warnings.push_back("skipped promotion '" + r.id +
                               "': outside the dataset span");
        continue;
      }
      if (rec.start < span->first || rec.end > span->second) {
        out.warnings.push_back("clipped promotion '" + r.id + "' to the dataset span");
        rec.start = std::max(rec.start, span->first);
        rec.end = std::min(rec.end, span->second);
      }
    }
    ds.promotions.push_back(std::move(rec));
  }

  ValidationReport report = validate_dataset(ds);
  if (!report.ok) throw DatasetInvalid(std::move(report));
  return out;
}

LoadedDataset load_csv_dir(const fs::path& dir) {
  std::vector<Product> products;
  {
    const std::string src = "products.csv";
    const CsvTable t = parse_csv(read_file(dir / src), src);
    const Columns c(t, {"id", "title", "category", "brand", "store", "base_price"}, src);
    for (std::size_t i = 0; i < t.rows.size(); ++i) {
      const auto& row = t.rows[i];
      Product p;
      p.id = row[c["id"]];
      p.title = row[c["title"]];
      p.category = row[c["category"]];
      p.brand = row[c["brand"]];
      p.store = row[c["store"]];
      p.base_price = parse_money_field(row[c["base_price"]], t.row_lines[i],
                                       c["base_price"] + 1, src);
      products.push_back(std::move(p));
    }
  }
  std::vector<RawSalesDay> sales;
  {
    const std::string src = "sales.csv";
    const CsvTable t = parse_csv(read_file(dir / src), src);
    const Columns c(t, {"product_id", "date", "units_sold", "price"}, src);
    for (std::size_t i = 0; i < t.rows.size(); ++i) {
      const auto& row = t.rows[i];
      const std::size_t line = t.row_lines[i];
      RawSalesDay d;
      d.product_id = row[c["product_id"]];
      d.date = parse_date_field(row[c["date"]], line, c["date"] + 1, src);
      d.units = parse_int_field(row[c["units_sold"]], line, c["units_sold"] + 1, src);
      if (!row[c["price"]].empty()) {
        d.price = parse_money_field(row[c["price"]], line, c["price"] + 1, src);
      }
      sales.push_back(std::move(d));
    }
  }
  std::vector<RawPromotion> promos;
  {
    const std::string src = "promotions.csv";
    const CsvTable t = parse_csv(read_file(dir / src), src);
    const Columns c(t, {"id", "product_id", "raw_text", "start", "end", "enabled"}, src);
    for (std::size_t i = 0; i < t.rows.size(); ++i) {
      const auto& row = t.rows[i];
      const std::size_t line = t.row_lines[i];
      RawPromotion p;
      p.id = row[c["id"]];
      p.product_id = row[c["product_id"]];
      p.raw_text = row[c["raw_text"]];
      p.start = parse_date_field(row[c["start"]], line, c["start"] + 1, src);
      p.end = parse_date_field(row[c["end"]], line, c["end"] + 1, src);
      p.enabled = parse_bool_field(row[c["enabled"]], line, c["enabled"] + 1, src);
      promos.push_back(std::move(p));
    }
  }
  return finish_load(std::move(products), std::move(sales), std::move(promos));
}

LoadedDataset load_json(const fs::path& file) {
  const std::string text = read_file(file);
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    std::size_t line = 1, column = 1;
    for (std::size_t i = 0; i + 1 < e.byte && i < text.size(); ++i) {
      if (text[i] == '\n') {
        ++line;
        column = 1;
      } else {
        ++column;
      }
    }
    throw ParseError(file.filename().string() + ": " + e.what(), line, column);
  }
  try {
    std::vector<Product> products;
    for (const json& p : doc.at("products")) products.push_back(p.get<Product>());
    std::vector<RawSalesDay> sales;
    for (const json& s : doc.at("sales")) {
      const std::string id = s.at("product_id").get<std::string>();
      for (const json& d : s.at("days")) {
        RawSalesDay day;
        day.product_id = id;
        day.date = Date::parse(d.at("date").get<std::string>());
        day.units = d.at("units_sold").get<std::int64_t>();
        if (d.contains("price") && !d.at("price").is_null()) {
          day.price = Money::from_double(d.at("price").get<double>());
        }
        sales.push_back(std::move(day));
      }
    }
    std::vector<RawPromotion> promos;
    for (const json& p : doc.value("promotions", json::array())) {
      RawPromotion r;
      r.id = p.at("id").get<std::string>();
      r.product_id = p.at("product_id").get<std::string>();
      r.raw_text = p.at("raw_text").get<std::string>();
      r.start = Date::parse(p.at("start").get<std::string>());
      r.end = Date::parse(p.at("end").get<std::string>());
      r.enabled = p.value("enabled", true);
      promos.push_back(std::move(r));
    }
    return finish_load(std::move(products), std::move(sales), std::move(promos));
  } catch (const json::exception& e) {
    throw ParseError(file.filename().string() + ": " + e.what());
  }
}

json dataset_to_json(const Dataset& ds) {
  json promos = json::array();
  for (const PromotionRecord& p : ds.promotions) promos.push_back(p);
  return json{{"format", "promocast-dataset"},
              {"version", 1},
              {"products", ds.products},
              {"sales", ds.sales},
              {"promotions", std::move(promos)}};
}

}  // namespace

LoadedDataset load_dataset(const fs::path& path, DatasetFormat format) {
  if (!fs::exists(path)) throw NotFound("no such path '" + path.string() + "'");
  return format == DatasetFormat::CsvDir ? load_csv_dir(path) : load_json(path);
}

void save_dataset(const Dataset& ds, const fs::path& path, DatasetFormat format) {
  if (format == DatasetFormat::Json) {
    write_file(path, dataset_to_json(ds).dump(2) + "\n");
    return;
  }
  fs::create_directories(path);
  CsvTable products{{"id", "title", "category", "brand", "store", "base_price"}, {}, {}};
  for (const Product& p : ds.products) {
    products.rows.push_back(
        {p.id, p.title, p.category, p.brand, p.store, p.base_price.to_string()});
  }
  CsvTable sales{{"product_id", "date", "units_sold", "price"}, {}, {}};
  for (const SalesSeries& s : ds.sales) {
    for (const SalesDay& d : s.days) {
      sales.rows.push_back({s.product_id, d.date.to_string(),
                            std::to_string(d.units_sold), d.price.to_string()});
    }
  }
  CsvTable promos{{"id", "product_id", "raw_text", "start", "end", "enabled"}, {}, {}};
  for (const PromotionRecord& p : ds.promotions) {
    promos.rows.push_back({p.id, p.product_id, p.raw_text, p.start.to_string(),
                           p.end.to_string(), p.enabled ? "true" : "false"});
  }
  write_file(path / "products.csv", write_csv(products));
  write_file(path / "sales.csv", write_csv(sales));
  write_file(path / "promotions.csv", write_csv(promos));
}

std::uint64_t dataset_fingerprint(const Dataset& dataset) {
  return fnv1a(dataset_to_json(dataset).dump());
}

// ---------------------------------------------------------------------------
// Synthetic data

void check_config(const SyntheticConfig& c) {
  if (c.n_products < 1) throw InvalidArgument("n_products must be >= 1");
  if (c.n_days < 30) throw InvalidArgument("n_days must be >= 30");
  if (!(c.noise_sd >= 0.0)) throw InvalidArgument("noise_sd must be >= 0");
  if (!(c.base_demand >= 0.0)) throw InvalidArgument("base_demand must be >= 0");
  if (!(c.price_elasticity <= 0.0)) throw InvalidArgument("price_elasticity must be <= 0");
  if (!(c.promo_lift >= 0.0)) throw InvalidArgument("promo_lift must be >= 0");
  if (!(c.season_amplitude >= 0.0 && c.season_amplitude < 1.0)) {
    throw InvalidArgument("season_amplitude must be in [0, 1)");
  }
  if (!(c.demand_spread >= 0.0 && c.demand_spread < 2.0)) {
    throw InvalidArgument("demand_spread must be in [0, 2)");
  }
  if (!(c.promotions_per_year >= 0.0)) throw InvalidArgument("promotions_per_year must be >= 0");
  if (c.n_categories < 1) throw InvalidArgument("n_categories must be >= 1");
  if (c.fixed_promotion_text) parse_promotion(*c.fixed_promotion_text);
}

namespace {

struct CategoryWords {
  const char* name;
  std::vector<const char*> words;
};

const std::vector<CategoryWords>& category_pool() {
  static const std::vector<CategoryWords> kPool = {
      {"sneakers", {"running", "shoe", "sneaker", "breathable", "lightweight", "men",
                    "women", "mesh", "sport", "cushion", "casual", "trail"}},
      {"jackets", {"jacket", "down", "winter", "windproof", "hooded", "waterproof",
                   "warm", "slim", "outdoor", "fleece", "men", "women"}},
      {"headphones", {"wireless", "headphones", "bluetooth", "noise", "cancelling",
                      "earbuds", "bass", "sport", "stereo", "foldable", "mic"}},
      {"backpacks", {"backpack", "laptop", "travel", "school", "waterproof", "large",
                     "capacity", "usb", "charging", "business", "casual"}},
      {"kettles", {"electric", "kettle", "stainless", "steel", "glass", "fast",
                   "boil", "auto", "shutoff", "household", "litre"}},
      {"watches", {"smart", "watch", "fitness", "tracker", "heart", "rate", "sleep",
                   "monitor", "waterproof", "sport", "gps"}},
  };
  return kPool;
}

constexpr const char* kBrands[] = {"Stride", "Nimbus", "Apex", "Orbit", "Vela",
                                   "Kestrel", "Lumen", "Quill"};
constexpr const char* kStores[] = {"flagship", "outlet", "marketplace"};

std::string render_sampled_promotion(PromotionKind kind, double base_price, Rng& rng,
                                     const RewardRates& rates) {
  switch (kind) {
    case PromotionKind::ValueDiscount: {
      const auto trigger = static_cast<std::int64_t>(
          std::ceil(base_price * rng.uniform(1.0, 3.0)));
      const double rate = rng.uniform(0.1, 0.4);
      const auto off = std::max<std::int64_t>(
          1, static_cast<std::int64_t>(std::llround(static_cast<double>(trigger) * rate)));
      return "$" + std::to_string(off) + " Off Orders Over $" + std::to_string(trigger);
    }
    case PromotionKind::PercentageDiscount:
      return std::to_string(rng.uniform_int(10, 40)) + "% Off";
    case PromotionKind::FlashSale:
      return std::to_string(rng.uniform_int(10, 40)) + "% Off in " +
             std::to_string(rng.uniform_int(2, 12)) + " Hours";
    case PromotionKind::LoyaltyPoints: {
      const double share = rng.uniform(0.1, 0.4);
      const auto points = std::max<std::int64_t>(
          1, std::llround(share * base_price / rates.currency_per_point));
      return std::to_string(points) + " Loyalty Points Back";
    }
    case PromotionKind::FreeShipping: {
      const auto trigger = static_cast<std::int64_t>(
          std::ceil(base_price * rng.uniform(1.0, 2.0)));
      return "Free Shipping on Orders Over $" + std::to_string(trigger);
    }
    case PromotionKind::InterestFreeInstallment: {
      static constexpr int kMonths[] = {24, 36, 48, 60};
      return std::to_string(kMonths[rng.uniform_int(0, 3)]) +
             " Months Interest-free Installment";
    }
  }
  return {};
}

std::string padded_id(const char* prefix, std::size_t n, int width) {
  std::string digits = std::to_string(n);
  if (static_cast<int>(digits.size()) < width) {
    digits.insert(0, static_cast<std::size_t>(width) - digits.size(), '0');
  }
  return prefix + digits;
}

}  // namespace

SyntheticDataset generate_synthetic(const SyntheticConfig& config) {
  check_config(config);
  SyntheticDataset out;
  Dataset& ds = out.dataset;
  const auto& pool = category_pool();
  const Date first_day = config.start;
  const Date last_day = config.start + static_cast<std::int32_t>(config.n_days) - 1;
  std::size_t promo_counter = 0;

  for (std::size_t p = 0; p < config.n_products; ++p) {
    Rng rng(derive_seed(config.seed, p));
    const std::size_t cat_index = p % config.n_categories;
    const CategoryWords& cat = pool[cat_index % pool.size()];

    Product product;
    product.id = padded_id("P", p + 1, 3);
    product.category = cat.name;
    if (cat_index >= pool.size()) product.category += "-" + std::to_string(cat_index / pool.size());
    product.brand = kBrands[rng.uniform_int(0, std::size(kBrands) - 1)];
    product.store = std::string(product.brand) + " " +
                    kStores[rng.uniform_int(0, std::size(kStores) - 1)];
    std::vector<const char*> words(cat.words.begin(), cat.words.end());
    for (std::size_t i = words.size() - 1; i > 0; --i) {
      std::swap(words[i], words[static_cast<std::size_t>(
                              rng.uniform_int(0, static_cast<std::int64_t>(i)))]);
    }
    product.title = product.brand;
    const auto n_words = static_cast<std::size_t>(rng.uniform_int(3, 5));
    for (std::size_t i = 0; i < n_words; ++i) product.title += std::string(" ") + words[i];
    product.base_price = Money::from_cents(rng.uniform_int(2000, 6000));
    const double base_price = product.base_price.to_double();
    const double demand =
        config.base_demand * (1.0 + config.demand_spread * rng.uniform(-0.5, 0.5));

    // Campaigns: non-overlapping 3-10 day windows.
    std::vector<PromotionRecord> promos;
    if (config.promotions_per_year > 0.0) {
      const double mean_gap = std::max(1.0, 365.0 / config.promotions_per_year - 6.5);
      Date cursor = first_day + static_cast<std::int32_t>(
                                    std::llround(rng.uniform(0.5, 1.5) * mean_gap));
      while (cursor <= last_day) {
        const auto duration = static_cast<std::int32_t>(rng.uniform_int(3, 10));
        const Date end = std::min(last_day, cursor + duration - 1);
        const auto kind = kAllPromotionKinds[static_cast<std::size_t>(rng.uniform_int(0, 5))];
        std::string text = config.fixed_promotion_text
                               ? *config.fixed_promotion_text
                               : render_sampled_promotion(kind, base_price, rng, config.rates);
        promos.push_back(make_promotion(padded_id("PR", ++promo_counter, 5), product.id,
                                        std::move(text), cursor, end));
        cursor = end + 1 + static_cast<std::int32_t>(
                               std::llround(rng.uniform(0.5, 1.5) * mean_gap));
      }
    }

    SalesSeries series{product.id, {}};
    Money price = product.base_price;
    Date next_price_change = first_day + static_cast<std::int32_t>(rng.uniform_int(30, 90));
    for (Date day = first_day; day <= last_day; day += 1) {
      if (day == next_price_change) {
        price = Money::from_cents(std::llround(
            static_cast<double>(product.base_price.cents()) * rng.uniform(0.85, 1.1)));
        next_price_change = day + static_cast<std::int32_t>(rng.uniform_int(30, 90));
      }
      const double season =
          1.0 + config.season_amplitude *
                    std::cos(2.0 * std::numbers::pi *
                             static_cast<double>(day.day_of_year()) / 365.25);
      const double price_effect =
          std::pow(price.to_double() / base_price, config.price_elasticity);
      const double strength = promotion_strength(promos, day, base_price, config.rates);
      const double lift = 1.0 + config.promo_lift * strength;
      const double expected = demand * season * price_effect * lift;
      const double noise = rng.normal() * config.noise_sd;
      const auto units = static_cast<std::int64_t>(std::llround(std::max(0.0, expected + noise)));
      series.days.push_back({day, units, price});
      out.ground_truth.push_back({product.id, day, lift, expected});
    }

    ds.products.push_back(std::move(product));
    ds.sales.push_back(std::move(series));
    ds.promotions.insert(ds.promotions.end(), promos.begin(), promos.end());
  }
  return out;
}

void save_ground_truth(const std::vector<GroundTruthDay>& truth, const fs::path& file) {
  CsvTable t{{"product_id", "date", "lift", "expected_units"}, {}, {}};
  char buf[64];
  for (const GroundTruthDay& g : truth) {
    std::snprintf(buf, sizeof buf, "%.17g", g.lift);
    std::string lift = buf;
    std::snprintf(buf, sizeof buf, "%.17g", g.expected_units);
    t.rows.push_back({g.product_id, g.date.to_string(), lift, buf});
  }
  write_file(file, write_csv(t));
}

// ---------------------------------------------------------------------------
// Model files

std::string serialize_model(const TrainedModel& model) {
  const std::string payload = model_to_json(model).dump();
  return "PROMOCAST-MODEL " + std::to_string(kModelFormatVersion) + " " +
         std::to_string(payload.size()) + " " + hex64(fnv1a(payload)) + "\n" + payload;
}

TrainedModel deserialize_model(std::string_view bytes) {
  const std::size_t newline = bytes.find('\n');
  if (newline == std::string_view::npos) throw CorruptFile("model file has no header line");
  std::istringstream header{std::string(bytes.substr(0, newline))};
  std::string magic, checksum;
  long long version = 0;
  std::size_t size = 0;
  if (!(header >> magic >> version >> size >> checksum) || magic != "PROMOCAST-MODEL") {
    throw CorruptFile("model file header is malformed");
  }
  if (version > kModelFormatVersion) {
    throw VersionError("model file format version " + std::to_string(version) +
                       " is newer than supported version " +
                       std::to_string(kModelFormatVersion));
  }
  if (version < 1) throw CorruptFile("model file version is invalid");
  const std::string_view payload = bytes.substr(newline + 1);
  if (payload.size() != size) {
    throw CorruptFile("model payload has " + std::to_string(payload.size()) +
                      " bytes, header says " + std::to_string(size) + " (truncated?)");
  }
  if (hex64(fnv1a(payload)) != checksum) throw CorruptFile("model payload checksum mismatch");
  try {
    return model_from_json(json::parse(payload));
  } catch (const json::exception& e) {
    throw CorruptFile(std::string("model payload is invalid: ") + e.what());
  } catch (const InvalidArgument& e) {
    throw CorruptFile(std::string("model payload is invalid: ") + e.what());
  }
}

void save_model(const TrainedModel& model, const fs::path& path) {
  write_file(path, serialize_model(model));
}

TrainedModel load_model(const fs::path& path) { return deserialize_model(read_file(path)); }

}  // namespace promocast
