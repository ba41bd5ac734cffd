#include "mtenet/data.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "mtenet/rng.hpp"

namespace mtenet {

namespace {

constexpr int kPoolDense = 1950;
constexpr int kPoolSparse = 50;
constexpr int kTrainDense = 900;
constexpr int kTrainSparse = 20;

double synthetic_mean(double x) {
  const double s = std::sin(4.0 * x);
  return s * s * s + x * x / 10.0;
}

std::string trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t\r");
  if (begin == std::string::npos) return "";
  const auto end = s.find_last_not_of(" \t\r");
  return s.substr(begin, end - begin + 1);
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  std::istringstream in(line);
  while (std::getline(in, field, ',')) fields.push_back(trim(field));
  if (!line.empty() && line.back() == ',') fields.push_back("");
  return fields;
}

}  // namespace

std::pair<Dataset, Dataset> gen_synthetic(std::uint64_t seed) {
  Rng rng(seed);
  std::vector<double> xs;
  xs.reserve(kPoolDense + kPoolSparse);
  for (int i = 0; i < kPoolDense; ++i) xs.push_back(rng.uniform(-3.0, 6.0));
  for (int i = 0; i < kPoolSparse; ++i) xs.push_back(rng.uniform(6.0, 10.0));

  std::vector<double> ys(xs.size());
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double x = xs[i];
    const double noise_sd = 0.05 * std::fabs(7.0 - std::fabs(x));
    const double eps = noise_sd * rng.gaussian();
    const double u = rng.uniform(-1.0, 1.0);
    ys[i] = synthetic_mean(x) + 2.0 * eps + 0.1 * u;
  }

  std::vector<int> dense_idx(kPoolDense);
  std::iota(dense_idx.begin(), dense_idx.end(), 0);
  rng.shuffle(dense_idx);
  std::vector<int> sparse_idx(kPoolSparse);
  std::iota(sparse_idx.begin(), sparse_idx.end(), kPoolDense);
  rng.shuffle(sparse_idx);

  std::vector<bool> in_train(xs.size(), false);
  for (int i = 0; i < kTrainDense; ++i) in_train[dense_idx[i]] = true;
  for (int i = 0; i < kTrainSparse; ++i) in_train[sparse_idx[i]] = true;

  Dataset train;
  Dataset test;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    Dataset& dst = in_train[i] ? train : test;
    dst.inputs.push_back({xs[i]});
    dst.targets.push_back(ys[i]);
    dst.regions.push_back(xs[i] <= 6.0 ? Region::dense : Region::sparse);
  }
  return {std::move(train), std::move(test)};
}

Normalization zscore_fit(const Dataset& train) {
  if (train.size() == 0) {
    throw std::invalid_argument("zscore_fit: empty dataset");
  }
  const std::size_t dim = train.feature_dim();
  const double n = static_cast<double>(train.size());

  Normalization stats;
  stats.feature_mean.assign(dim, 0.0);
  stats.feature_std.assign(dim, 0.0);
  for (const auto& x : train.inputs) {
    for (std::size_t j = 0; j < dim; ++j) stats.feature_mean[j] += x[j];
  }
  for (std::size_t j = 0; j < dim; ++j) stats.feature_mean[j] /= n;
  for (const auto& x : train.inputs) {
    for (std::size_t j = 0; j < dim; ++j) {
      const double d = x[j] - stats.feature_mean[j];
      stats.feature_std[j] += d * d;
    }
  }
  for (std::size_t j = 0; j < dim; ++j) {
    stats.feature_std[j] = std::sqrt(stats.feature_std[j] / n);
    if (!(stats.feature_std[j] > 0.0)) {
      throw std::runtime_error("zscore_fit: feature " + std::to_string(j) +
                               " has zero variance");
    }
  }

  stats.target_mean =
      std::accumulate(train.targets.begin(), train.targets.end(), 0.0) / n;
  double var = 0.0;
  for (const double y : train.targets) {
    var += (y - stats.target_mean) * (y - stats.target_mean);
  }
  stats.target_std = std::sqrt(var / n);
  if (!(stats.target_std > 0.0)) {
    throw std::runtime_error("zscore_fit: target has zero variance");
  }
  return stats;
}

Dataset zscore_apply(const Dataset& data, const Normalization& stats) {
  if (data.feature_dim() != stats.feature_mean.size()) {
    throw std::invalid_argument("zscore_apply: feature dim mismatch");
  }
  Dataset out = data;
  for (auto& x : out.inputs) {
    for (std::size_t j = 0; j < x.size(); ++j) {
      x[j] = (x[j] - stats.feature_mean[j]) / stats.feature_std[j];
    }
  }
  for (auto& y : out.targets) y = (y - stats.target_mean) / stats.target_std;
  out.normalization = stats;
  return out;
}

Normalization zscore_fit_apply(Dataset& train, Dataset& test) {
  const Normalization stats = zscore_fit(train);
  train = zscore_apply(train, stats);
  test = zscore_apply(test, stats);
  return stats;
}

double normalize_target(double y, const Normalization& stats) {
  return (y - stats.target_mean) / stats.target_std;
}

double denormalize_target(double y, const Normalization& stats) {
  return y * stats.target_std + stats.target_mean;
}

Dataset load_csv(const std::string& path, const std::string& target_column,
                 const std::string& region_column) {
  std::ifstream in(path);
  if (!in) {
    throw std::runtime_error("load_csv: cannot open " + path);
  }
  std::string line;
  if (!std::getline(in, line)) {
    throw std::runtime_error("load_csv: " + path + " is empty");
  }
  const std::vector<std::string> header = split_csv_line(line);
  std::ptrdiff_t target_idx = -1;
  std::ptrdiff_t region_idx = -1;
  for (std::size_t j = 0; j < header.size(); ++j) {
    if (header[j] == target_column) target_idx = static_cast<std::ptrdiff_t>(j);
    if (!region_column.empty() && header[j] == region_column) {
      region_idx = static_cast<std::ptrdiff_t>(j);
    }
  }
  if (target_idx < 0) {
    throw std::runtime_error("load_csv: target column '" + target_column +
                             "' not found in " + path);
  }
  if (!region_column.empty() && region_idx < 0) {
    throw std::runtime_error("load_csv: region column '" + region_column +
                             "' not found in " + path);
  }

  Dataset data;
  std::size_t row = 0;
  while (std::getline(in, line)) {
    ++row;
    if (trim(line).empty()) continue;
    const std::vector<std::string> fields = split_csv_line(line);
    if (fields.size() != header.size()) {
      throw std::runtime_error(
          "load_csv: row " + std::to_string(row) + ": expected " +
          std::to_string(header.size()) + " fields, got " +
          std::to_string(fields.size()));
    }
    std::vector<double> x;
    x.reserve(header.size() - 1);
    for (std::size_t j = 0; j < fields.size(); ++j) {
      if (static_cast<std::ptrdiff_t>(j) == region_idx) {
        if (fields[j] == "dense") {
          data.regions.push_back(Region::dense);
        } else if (fields[j] == "sparse") {
          data.regions.push_back(Region::sparse);
        } else {
          throw std::runtime_error("load_csv: row " + std::to_string(row) +
                                   ", column '" + header[j] +
                                   "': unknown region tag '" + fields[j] + "'");
        }
        continue;
      }
      std::size_t consumed = 0;
      double value = 0.0;
      bool ok = !fields[j].empty();
      if (ok) {
        try {
          value = std::stod(fields[j], &consumed);
        } catch (const std::exception&) {
          ok = false;
        }
      }
      if (!ok || consumed != fields[j].size()) {
        throw std::runtime_error("load_csv: row " + std::to_string(row) +
                                 ", column '" + header[j] +
                                 "': not numeric: '" + fields[j] + "'");
      }
      if (static_cast<std::ptrdiff_t>(j) == target_idx) {
        data.targets.push_back(value);
      } else {
        x.push_back(value);
      }
    }
    data.inputs.push_back(std::move(x));
  }
  if (data.size() == 0) {
    throw std::runtime_error("load_csv: " + path + " has no data rows");
  }
  return data;
}

std::vector<std::vector<double>> make_ood_inputs(std::uint64_t seed, int n) {
  if (n < 1) {
    throw std::invalid_argument("make_ood_inputs: n must be >= 1");
  }
  Rng rng(seed);
  std::vector<std::vector<double>> out;
  out.reserve(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    // Uniform over the union of two length-3 intervals.
    const double u = rng.uniform(0.0, 6.0);
    out.push_back({u < 3.0 ? -8.0 + u : 12.0 + (u - 3.0)});
  }
  return out;
}

Dataset filter_region(const Dataset& data, Region region) {
  if (data.regions.size() != data.size()) {
    throw std::invalid_argument("filter_region: dataset has no region tags");
  }
  Dataset out;
  out.normalization = data.normalization;
  for (std::size_t i = 0; i < data.size(); ++i) {
    if (data.regions[i] == region) {
      out.inputs.push_back(data.inputs[i]);
      out.targets.push_back(data.targets[i]);
      out.regions.push_back(region);
    }
  }
  return out;
}

}  // namespace mtenet
