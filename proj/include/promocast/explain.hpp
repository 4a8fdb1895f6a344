#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "promocast/domain.hpp"
#include "promocast/matrix.hpp"
#include "promocast/models.hpp"

namespace promocast {

// Reference rows for the interventional value function.
struct Background {
  Matrix rows;
  std::vector<double> slot_means;
  std::uint64_t layout_fingerprint = 0;
};

Background make_background(Matrix rows, std::uint64_t layout_fingerprint = 0);

// Seeded sample of at most `size` rows (without replacement).
Background sample_background(const Matrix& training_rows, std::size_t size,
                             std::uint64_t seed,
                             std::uint64_t layout_fingerprint = 0);

inline constexpr std::size_t kDefaultBackgroundSize = 64;

struct GroupShapley {
  GroupAttribution phi{};
  double baseline = 0.0;    // value of the empty coalition
  double prediction = 0.0;  // value of the full coalition
};

// Exact Shapley values of the five feature groups. The value of a coalition
// is the mean prediction over background rows with the slots of absent
// groups taken from the background row.
GroupShapley shapley_groups(const TrainedModel& model, std::span<const double> x,
                            const GroupMap& groups, const Background& background);

GroupShapley shapley_groups(const TrainedModel& model, const FeatureVector& x,
                            const Background& background);

// Coalition values indexed by bitmask (bit g set = group g present).
std::vector<double> coalition_values(const TrainedModel& model,
                                     std::span<const double> x,
                                     const GroupMap& groups,
                                     const Background& background);

// phi scaled so that sum |phi| = 1; all zeros stay zeros.
GroupAttribution normalize_attribution(const GroupAttribution& phi);

struct HorizonAttribution {
  std::vector<GroupShapley> raw;
  std::vector<GroupAttribution> normalized;
};

HorizonAttribution attribute_horizon(const TrainedModel& model,
                                     std::span<const FeatureVector> rows,
                                     const Background& background);

}  // namespace promocast
