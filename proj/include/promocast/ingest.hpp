#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "promocast/domain.hpp"
#include "promocast/error.hpp"
#include "promocast/models.hpp"
#include "promocast/promo_parser.hpp"

namespace promocast {

enum class DatasetFormat { CsvDir, Json };

DatasetFormat dataset_format_from_string(std::string_view name);

// The dataset failed validation after parsing.
class DatasetInvalid : public Error {
 public:
  explicit DatasetInvalid(ValidationReport report);
  const ValidationReport& report() const { return report_; }

 private:
  ValidationReport report_;
};

struct LoadedDataset {
  Dataset dataset;
  // Skipped promotions and clipping notes.
  std::vector<std::string> warnings;
};

// csv-dir: products.csv, sales.csv, promotions.csv inside `path`.
// json: a single document. Promotion text is parsed on load; records that
// match no grammar are skipped with a warning. Promotions are clipped to the
// sales span. Throws ParseError or DatasetInvalid.
LoadedDataset load_dataset(const std::filesystem::path& path, DatasetFormat format);

void save_dataset(const Dataset& dataset, const std::filesystem::path& path,
                  DatasetFormat format);

// Stable hash of the dataset contents.
std::uint64_t dataset_fingerprint(const Dataset& dataset);

// RFC 4180 subset: comma separated, double-quote escaping, header row first.
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
  std::vector<std::size_t> row_lines;  // 1-based line of each row
};

CsvTable parse_csv(std::string_view text, const std::string& source = "csv");
std::string write_csv(const CsvTable& table);

struct SyntheticConfig {
  std::size_t n_products = 20;
  std::size_t n_days = 500;
  double base_demand = 100.0;
  double price_elasticity = -1.0;
  double promo_lift = 1.0;
  double season_amplitude = 0.2;
  double noise_sd = 5.0;
  std::uint64_t seed = 7;
  // Per-product demand scale is base_demand * (1 + spread * U(-0.5, 0.5)).
  double demand_spread = 0.5;
  // Mean campaigns per 365 days; 0 disables promotions.
  double promotions_per_year = 12.0;
  // When set, every campaign uses this text instead of a sampled one.
  std::optional<std::string> fixed_promotion_text;
  std::size_t n_categories = 4;
  Date start = Date::from_ymd(2019, 1, 1);
  RewardRates rates;
};

// Throws InvalidArgument.
void check_config(const SyntheticConfig& config);

struct GroundTruthDay {
  std::string product_id;
  Date date;
  double lift = 1.0;           // 1 + promo_lift * active promotion strength
  double expected_units = 0.0;  // noise-free mean before rounding
};

struct SyntheticDataset {
  Dataset dataset;
  std::vector<GroundTruthDay> ground_truth;
};

SyntheticDataset generate_synthetic(const SyntheticConfig& config);

void save_ground_truth(const std::vector<GroundTruthDay>& truth,
                       const std::filesystem::path& file);

inline constexpr int kModelFormatVersion = 1;

// Container: one header line "PROMOCAST-MODEL <version> <bytes> <fnv1a>"
// followed by a JSON payload.
void save_model(const TrainedModel& model, const std::filesystem::path& path);
// Throws VersionError for newer formats and CorruptFile for damaged files.
TrainedModel load_model(const std::filesystem::path& path);

std::string serialize_model(const TrainedModel& model);
TrainedModel deserialize_model(std::string_view bytes);

std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::string_view bytes);

}  // namespace promocast
