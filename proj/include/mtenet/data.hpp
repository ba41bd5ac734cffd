#ifndef MTENET_DATA_HPP
#define MTENET_DATA_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace mtenet {

enum class Region { dense, sparse };

// Per-feature and target z-score statistics, always fitted on a training
// split only.
struct Normalization {
  std::vector<double> feature_mean;
  std::vector<double> feature_std;
  double target_mean = 0.0;
  double target_std = 1.0;
};

struct Dataset {
  std::vector<std::vector<double>> inputs;
  std::vector<double> targets;
  // Empty, or one tag per sample.
  std::vector<Region> regions;
  // Present when inputs/targets are stored in z-scored units.
  std::optional<Normalization> normalization;

  std::size_t size() const { return targets.size(); }
  std::size_t feature_dim() const {
    return inputs.empty() ? 0 : inputs.front().size();
  }
};

// 1-D benchmark set: 1950 x uniform on [-3, 6] plus 50 uniform on [6, 10],
// y = sin(4x)^3 + x^2/10 + 2 eps + 0.1 u with eps ~ N(0, sd 0.05 |7 - |x||)
// and u ~ Uniform(-1, 1). The training split is a seeded subsample of 900
// dense plus 20 sparse points; everything else is the test split. Samples
// with x <= 6 are tagged dense, x > 6 sparse.
std::pair<Dataset, Dataset> gen_synthetic(std::uint64_t seed);

// Statistics from `train` only; throws when a feature or the target has
// zero variance.
Normalization zscore_fit(const Dataset& train);
Dataset zscore_apply(const Dataset& data, const Normalization& stats);
Normalization zscore_fit_apply(Dataset& train, Dataset& test);

double normalize_target(double y, const Normalization& stats);
double denormalize_target(double y, const Normalization& stats);

// Comma-separated numeric table with a header row. All columns except the
// target (and the optional region tag column) become features, in header
// order. Malformed cells are rejected with row and column diagnostics.
Dataset load_csv(const std::string& path, const std::string& target_column,
                 const std::string& region_column = "");

// 1-D inputs uniform on [-8, -5] union [12, 15], disjoint from the
// synthetic training support [-3, 10].
std::vector<std::vector<double>> make_ood_inputs(std::uint64_t seed, int n);

Dataset filter_region(const Dataset& data, Region region);

}  // namespace mtenet

#endif  // MTENET_DATA_HPP
