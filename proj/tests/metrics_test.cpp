#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "mtenet/losses.hpp"
#include "mtenet/metrics.hpp"
#include "mtenet/rng.hpp"
#include "test_util.hpp"

using namespace mtenet;

TEST_CASE("rmse basics") {
  const std::vector<double> ys{0.0, 0.0};
  const std::vector<double> preds{1.0, -1.0};
  CHECK(rmse(ys, preds) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(rmse(ys, ys) == 0.0);

  const std::vector<double> ys2{0.0, 0.0, 5.0};
  const std::vector<double> p2{1.0, -1.0, 5.5};
  const std::vector<double> ys2_perm{5.0, 0.0, 0.0};
  const std::vector<double> p2_perm{5.5, 1.0, -1.0};
  CHECK(rmse(ys2, p2) == doctest::Approx(rmse(ys2_perm, p2_perm)).epsilon(1e-15));

  CHECK_THROWS_AS(rmse({}, {}), std::invalid_argument);
}

TEST_CASE("concordance index on the canonical cases") {
  CHECK(*concordance_index(std::vector<double>{1, 2, 3},
                           std::vector<double>{1, 2, 3}) == 1.0);
  CHECK(*concordance_index(std::vector<double>{1, 2},
                           std::vector<double>{2, 1}) == 0.0);
  CHECK(*concordance_index(std::vector<double>{1, 2, 3},
                           std::vector<double>{4, 4, 4}) == 0.5);

  // ties in y contribute no pairs; all-tied targets are undefined
  CHECK(!concordance_index(std::vector<double>{2, 2, 2},
                           std::vector<double>{1, 2, 3})
             .has_value());
  CHECK_THROWS_AS(concordance_index(std::vector<double>{1}, std::vector<double>{1}),
                  std::invalid_argument);
}

TEST_CASE("concordance index is invariant under monotone transforms") {
  Rng rng(61);
  std::vector<double> ys, preds, warped;
  for (int i = 0; i < 60; ++i) {
    ys.push_back(rng.uniform(-5.0, 5.0));
    preds.push_back(rng.uniform(-5.0, 5.0));
    warped.push_back(std::exp(preds.back()) * 3.0 + 1.0);
  }
  CHECK(*concordance_index(ys, preds) ==
        doctest::Approx(*concordance_index(ys, warped)).epsilon(1e-15));
}

TEST_CASE("ece of a pointwise-exact predictor is the grid mean of 1 - P") {
  std::vector<double> ys;
  std::vector<EvidentialOutput> ms;
  Rng rng(62);
  for (int i = 0; i < 40; ++i) {
    const double y = rng.uniform(-3.0, 3.0);
    ys.push_back(y);
    ms.push_back(testutil::random_output(rng, y));  // gamma == y
  }
  CHECK(ece(ys, ms) == doctest::Approx(0.495).epsilon(1e-12));
  CHECK_THROWS_AS(ece({}, {}), std::invalid_argument);
}

TEST_CASE("ece via the cdf transform equals the quantile-interval definition") {
  Rng rng(63);
  std::vector<double> ys;
  std::vector<EvidentialOutput> ms;
  for (int i = 0; i < 50; ++i) {
    ms.push_back(testutil::random_output(rng, rng.uniform(-2, 2)));
    ys.push_back(rng.uniform(-4.0, 4.0));
  }
  const double got = ece(ys, ms);

  double want = 0.0;
  for (int level = 1; level <= 100; ++level) {
    const double p = level / 100.0;
    int inside = 0;
    if (level == 100) {
      inside = static_cast<int>(ys.size());  // the total interval
    } else {
      for (std::size_t i = 0; i < ys.size(); ++i) {
        const double lo = marginal_quantile((1.0 - p) / 2.0, ms[i]);
        const double hi = marginal_quantile((1.0 + p) / 2.0, ms[i]);
        if (ys[i] >= lo && ys[i] <= hi) ++inside;
      }
    }
    want += std::fabs(static_cast<double>(inside) /
                          static_cast<double>(ys.size()) -
                      p);
  }
  want /= 100.0;
  CHECK(got == doctest::Approx(want).epsilon(1e-9));
}

TEST_CASE("ece self-calibration monte carlo") {
  // Targets drawn from each sample's own marginal: dof 6 via
  // z / sqrt(chi2_6 / 6), an independent sampling route.
  const EvidentialOutput m{0.0, 2.0, 3.0, 2.0};  // scale 1, dof 6
  Rng rng(64);
  std::vector<double> ys;
  std::vector<EvidentialOutput> ms;
  for (int i = 0; i < 10000; ++i) {
    double chi2 = 0.0;
    for (int k = 0; k < 6; ++k) {
      const double z = rng.gaussian();
      chi2 += z * z;
    }
    const double t = rng.gaussian() / std::sqrt(chi2 / 6.0);
    ys.push_back(m.gamma + std::sqrt(1.0) * t);
    ms.push_back(m);
  }
  CHECK(ece(ys, ms) < 0.02);
}

TEST_CASE("mean nll is the batch mean of the loss") {
  Rng rng(65);
  std::vector<double> ys;
  std::vector<EvidentialOutput> ms;
  double sum = 0.0;
  for (int i = 0; i < 20; ++i) {
    ms.push_back(testutil::random_output(rng, rng.uniform(-2, 2)));
    ys.push_back(rng.uniform(-3.0, 3.0));
    sum += nll_loss(ys.back(), ms.back());
  }
  CHECK(mean_nll(ys, ms) == doctest::Approx(sum / 20.0).epsilon(1e-14));
}

TEST_CASE("auroc rank statistic") {
  CHECK(auroc(std::vector<double>{1, 2}, std::vector<double>{3, 4}) == 1.0);
  CHECK(auroc(std::vector<double>{1, 2, 3}, std::vector<double>{1, 2, 3}) ==
        0.5);
  CHECK(auroc(std::vector<double>{1, 3}, std::vector<double>{2, 4}) == 0.75);
  CHECK_THROWS_AS(auroc({}, std::vector<double>{1.0}), std::invalid_argument);
  CHECK_THROWS_AS(auroc(std::vector<double>{1.0}, {}), std::invalid_argument);
}

TEST_CASE("auroc antisymmetry for tie-free scores") {
  Rng rng(66);
  std::vector<double> a, b;
  for (int i = 0; i < 64; ++i) a.push_back(rng.uniform());
  for (int i = 0; i < 37; ++i) b.push_back(rng.uniform());
  CHECK(auroc(a, b) + auroc(b, a) == doctest::Approx(1.0).epsilon(1e-12));

  // matches the brute-force pair count
  double wins = 0.0;
  for (const double s_ood : b) {
    for (const double s_id : a) {
      if (s_ood > s_id) {
        wins += 1.0;
      } else if (s_ood == s_id) {
        wins += 0.5;
      }
    }
  }
  CHECK(auroc(a, b) ==
        doctest::Approx(wins / (64.0 * 37.0)).epsilon(1e-12));
}
