#include <doctest.h>

#include <cmath>
#include <stdexcept>
#include <filesystem>
#include <fstream>
#include <set>
#include <string>

#include "mtenet/data.hpp"

using namespace mtenet;

namespace {

std::string write_temp(const std::string& name, const std::string& body) {
  const std::string path =
      (std::filesystem::temp_directory_path() / name).string();
  std::ofstream out(path);
  out << body;
  return path;
}

}  // namespace

TEST_CASE("synthetic split sizes and tags") {
  const auto [train, test] = gen_synthetic(7);
  CHECK(train.size() == 920);
  CHECK(test.size() == 1080);

  int sparse_train = 0;
  for (std::size_t i = 0; i < train.size(); ++i) {
    const double x = train.inputs[i][0];
    CHECK(x >= -3.0);
    CHECK(x <= 10.0);
    const Region want = x <= 6.0 ? Region::dense : Region::sparse;
    CHECK(train.regions[i] == want);
    if (train.regions[i] == Region::sparse) ++sparse_train;
  }
  CHECK(sparse_train == 20);

  int sparse_test = 0;
  for (std::size_t i = 0; i < test.size(); ++i) {
    const Region want = test.inputs[i][0] <= 6.0 ? Region::dense : Region::sparse;
    CHECK(test.regions[i] == want);
    if (test.regions[i] == Region::sparse) ++sparse_test;
  }
  CHECK(sparse_test == 30);
}

TEST_CASE("synthetic generation is deterministic and splits are disjoint") {
  const auto [a_train, a_test] = gen_synthetic(123);
  const auto [b_train, b_test] = gen_synthetic(123);
  CHECK(a_train.inputs == b_train.inputs);
  CHECK(a_train.targets == b_train.targets);
  CHECK(a_test.inputs == b_test.inputs);
  CHECK(a_test.targets == b_test.targets);

  const auto [c_train, c_test] = gen_synthetic(124);
  CHECK(a_train.inputs != c_train.inputs);

  std::set<double> train_xs;
  for (const auto& x : a_train.inputs) train_xs.insert(x[0]);
  CHECK(train_xs.size() == a_train.size());  // continuous draws, no collision
  for (const auto& x : a_test.inputs) CHECK(train_xs.count(x[0]) == 0);
}

TEST_CASE("zscore fit/apply normalizes the train split and round-trips") {
  auto [train, test] = gen_synthetic(9);
  const Normalization stats = zscore_fit_apply(train, test);

  double mean = 0.0;
  for (const auto& x : train.inputs) mean += x[0];
  mean /= static_cast<double>(train.size());
  CHECK(std::fabs(mean) < 1e-10);
  double var = 0.0;
  for (const auto& x : train.inputs) var += x[0] * x[0];
  CHECK(std::sqrt(var / static_cast<double>(train.size())) ==
        doctest::Approx(1.0).epsilon(1e-10));

  double target_mean = 0.0;
  for (const double y : train.targets) target_mean += y;
  CHECK(std::fabs(target_mean / static_cast<double>(train.size())) < 1e-10);

  CHECK(denormalize_target(normalize_target(3.7, stats), stats) ==
        doctest::Approx(3.7).epsilon(1e-12));

  // statistics come from train only, so test does not center exactly
  double test_mean = 0.0;
  for (const auto& x : test.inputs) test_mean += x[0];
  CHECK(std::fabs(test_mean / static_cast<double>(test.size())) > 1e-6);

  CHECK(train.normalization.has_value());
  CHECK(test.normalization.has_value());
}

TEST_CASE("zscore rejects zero-variance columns") {
  Dataset flat;
  flat.inputs = {{1.0, 2.0}, {1.0, 3.0}, {1.0, 4.0}};
  flat.targets = {0.0, 1.0, 2.0};
  CHECK_THROWS_WITH_AS(zscore_fit(flat), doctest::Contains("feature 0"),
                       std::runtime_error);

  Dataset flat_target;
  flat_target.inputs = {{1.0}, {2.0}, {3.0}};
  flat_target.targets = {5.0, 5.0, 5.0};
  CHECK_THROWS_WITH_AS(zscore_fit(flat_target), doctest::Contains("target"),
                       std::runtime_error);
}

TEST_CASE("csv loading: happy path") {
  const std::string path = write_temp(
      "mtenet_ok.csv", "a,b,y\n1,2,3\n4,5,6\n7.5, 8.25 ,9e-1\n");
  const Dataset d = load_csv(path, "y");
  CHECK(d.size() == 3);
  CHECK(d.feature_dim() == 2);
  CHECK(d.inputs[2][0] == 7.5);
  CHECK(d.inputs[2][1] == 8.25);
  CHECK(d.targets[2] == 0.9);
  std::filesystem::remove(path);
}

TEST_CASE("csv loading: region column") {
  const std::string path = write_temp(
      "mtenet_region.csv", "x,y,region\n1,2,dense\n3,4,sparse\n");
  const Dataset d = load_csv(path, "y", "region");
  CHECK(d.size() == 2);
  CHECK(d.feature_dim() == 1);
  CHECK(d.regions == std::vector<Region>{Region::dense, Region::sparse});
  std::filesystem::remove(path);
}

TEST_CASE("csv loading: diagnostics") {
  const std::string bad_cell =
      write_temp("mtenet_bad.csv", "a,y\n1,2\nx7,3\n");
  CHECK_THROWS_WITH_AS(load_csv(bad_cell, "y"),
                       doctest::Contains("row 2, column 'a'"),
                       std::runtime_error);
  std::filesystem::remove(bad_cell);

  const std::string header_only = write_temp("mtenet_empty.csv", "a,y\n");
  CHECK_THROWS_WITH_AS(load_csv(header_only, "y"),
                       doctest::Contains("no data rows"), std::runtime_error);
  std::filesystem::remove(header_only);

  const std::string ragged = write_temp("mtenet_ragged.csv", "a,y\n1,2,3\n");
  CHECK_THROWS_WITH_AS(load_csv(ragged, "y"), doctest::Contains("row 1"),
                       std::runtime_error);
  std::filesystem::remove(ragged);

  const std::string missing_col = write_temp("mtenet_col.csv", "a,b\n1,2\n");
  CHECK_THROWS_WITH_AS(load_csv(missing_col, "y"),
                       doctest::Contains("target column 'y'"),
                       std::runtime_error);
  std::filesystem::remove(missing_col);

  CHECK_THROWS_AS(load_csv("/nonexistent/file.csv", "y"), std::runtime_error);
}

TEST_CASE("ood inputs live outside the training support") {
  const auto inputs = make_ood_inputs(3, 100);
  CHECK(inputs.size() == 100);
  for (const auto& x : inputs) {
    CHECK(x.size() == 1);
    const bool left = x[0] >= -8.0 && x[0] <= -5.0;
    const bool right = x[0] >= 12.0 && x[0] <= 15.0;
    CHECK((left || right));
    CHECK(!(x[0] >= -3.0 && x[0] <= 10.0));
  }
  CHECK(make_ood_inputs(3, 100) == inputs);
  CHECK(make_ood_inputs(4, 100) != inputs);
  CHECK_THROWS_AS(make_ood_inputs(3, 0), std::invalid_argument);
}

TEST_CASE("region filter keeps the matching rows") {
  const auto [train, test] = gen_synthetic(5);
  const Dataset sparse = filter_region(test, Region::sparse);
  CHECK(sparse.size() == 30);
  for (const auto& x : sparse.inputs) CHECK(x[0] > 6.0);

  Dataset untagged;
  untagged.inputs = {{1.0}};
  untagged.targets = {1.0};
  CHECK_THROWS_AS(filter_region(untagged, Region::dense),
                  std::invalid_argument);
}
