#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "mtenet/losses.hpp"
#include "mtenet/nig.hpp"
#include "mtenet/rng.hpp"
#include "test_util.hpp"

using namespace mtenet;

TEST_CASE("construction enforces the parameter domain") {
  CHECK_NOTHROW(EvidentialOutput(0.0, 1.0, 2.0, 1.0));
  CHECK_THROWS_AS(EvidentialOutput(0.0, 0.0, 2.0, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(EvidentialOutput(0.0, -1.0, 2.0, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(EvidentialOutput(0.0, 1.0, 1.0, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(EvidentialOutput(0.0, 1.0, 1.0 + 1e-13, 1.0),
                  std::invalid_argument);
  CHECK_NOTHROW(EvidentialOutput(0.0, 1.0, 1.0 + 1e-11, 1.0));
  CHECK_THROWS_AS(EvidentialOutput(0.0, 1.0, 2.0, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(EvidentialOutput(NAN, 1.0, 2.0, 1.0), std::invalid_argument);
}

TEST_CASE("predictive summary evaluates the closed-form moments") {
  const PredictiveSummary a = predictive_summary({3.0, 2.0, 3.0, 4.0});
  CHECK(a.mean == 3.0);
  CHECK(a.aleatoric == doctest::Approx(2.0).epsilon(1e-15));
  CHECK(a.epistemic == doctest::Approx(1.0).epsilon(1e-15));

  const PredictiveSummary b = predictive_summary({0.0, 1.0, 2.0, 1.0});
  CHECK(b.mean == 0.0);
  CHECK(b.aleatoric == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(b.epistemic == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("epistemic equals aleatoric / nu and vanishes with many pseudo obs") {
  Rng rng(21);
  for (int i = 0; i < 300; ++i) {
    const EvidentialOutput m = testutil::random_output(rng, rng.uniform(-5, 5));
    const PredictiveSummary s = predictive_summary(m);
    CHECK(s.epistemic == s.aleatoric / m.nu);
  }
  const PredictiveSummary wide = predictive_summary({0.0, 1e12, 2.0, 1.0});
  CHECK(wide.aleatoric == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(wide.epistemic < 1e-9);
}

TEST_CASE("marginal params follow the student-t mapping") {
  const StudentTParams a = marginal_params({0.0, 1.0, 2.0, 1.0});
  CHECK(a.location == 0.0);
  CHECK(a.scale == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(a.dof == doctest::Approx(4.0).epsilon(1e-15));

  const StudentTParams b = marginal_params({5.0, 1.0, 1.5, 3.0});
  CHECK(b.location == 5.0);
  CHECK(b.scale == doctest::Approx(4.0).epsilon(1e-15));
  CHECK(b.dof == doctest::Approx(3.0).epsilon(1e-15));

  Rng rng(22);
  for (int i = 0; i < 100; ++i) {
    const EvidentialOutput m = testutil::random_output(rng, rng.uniform(-9, 9));
    CHECK(marginal_params(m).location == m.gamma);
  }
}

TEST_CASE("log marginal pdf at the dof-4 reference point") {
  // t(0; 0, 1, 4) = Gamma(2.5) / (sqrt(4 pi) Gamma(2)) = 3/8
  const double got = log_marginal_pdf(0.0, {0.0, 1.0, 2.0, 1.0});
  CHECK(got == doctest::Approx(std::log(0.375)).epsilon(1e-13));
}

TEST_CASE("the marginal density peaks at gamma") {
  Rng rng(23);
  for (int i = 0; i < 50; ++i) {
    const EvidentialOutput m = testutil::random_output(rng, rng.uniform(-5, 5));
    const double peak = log_marginal_pdf(m.gamma, m);
    for (const double step : {0.1, 1.0, 3.0}) {
      CHECK(peak > log_marginal_pdf(m.gamma + step, m));
      CHECK(peak > log_marginal_pdf(m.gamma - step, m));
    }
  }
}

TEST_CASE("log marginal pdf agrees with the negated NLL loss") {
  Rng rng(24);
  for (int i = 0; i < 1000; ++i) {
    const EvidentialOutput m = testutil::random_output(rng, rng.uniform(-5, 5));
    const double y = rng.uniform(-8.0, 8.0);
    CHECK(std::fabs(log_marginal_pdf(y, m) + nll_loss(y, m)) < 1e-10);
  }
}

TEST_CASE("the marginal density integrates to one") {
  Rng rng(25);
  for (int i = 0; i < 5; ++i) {
    const EvidentialOutput m = testutil::random_output(rng, rng.uniform(-3, 3));
    const StudentTParams t = marginal_params(m);
    const double half_width = 50.0 * std::sqrt(t.scale);
    const double integral = testutil::adaptive_simpson(
        [&m](double y) { return std::exp(log_marginal_pdf(y, m)); },
        t.location - half_width, t.location + half_width);
    CHECK(integral == doctest::Approx(1.0).epsilon(1e-3));
  }
}

TEST_CASE("marginal cdf basics") {
  const EvidentialOutput m{0.0, 1.0, 2.0, 1.0};  // loc 0, scale 1, dof 4
  CHECK(marginal_cdf(0.0, m) == 0.5);

  // Quadrature oracle for the dof-4 cdf at 2.
  const double tail = testutil::adaptive_simpson(
      [&m](double y) { return std::exp(log_marginal_pdf(y, m)); }, 0.0, 2.0);
  const double want = 0.5 + tail;
  CHECK(marginal_cdf(2.0, m) == doctest::Approx(want).epsilon(1e-9));
  CHECK(marginal_cdf(2.0, m) == doctest::Approx(0.94194).epsilon(1e-5));

  CHECK(marginal_cdf(1e9, m) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(marginal_cdf(-1e9, m) == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("marginal cdf is monotone") {
  Rng rng(26);
  for (int i = 0; i < 30; ++i) {
    const EvidentialOutput m = testutil::random_output(rng, rng.uniform(-5, 5));
    const StudentTParams t = marginal_params(m);
    double prev = 0.0;
    for (int k = -40; k <= 40; ++k) {
      const double y = t.location + 0.25 * k * std::sqrt(t.scale);
      const double v = marginal_cdf(y, m);
      CHECK(v >= prev - 1e-14);
      prev = v;
    }
  }
}

TEST_CASE("marginal quantile inverts the cdf") {
  Rng rng(27);
  for (int i = 0; i < 20; ++i) {
    const EvidentialOutput m = testutil::random_output(rng, rng.uniform(-5, 5));
    for (const double p : {0.01, 0.25, 0.9}) {
      CHECK(marginal_cdf(marginal_quantile(p, m), m) ==
            doctest::Approx(p).epsilon(1e-9));
    }
    const StudentTParams t = marginal_params(m);
    CHECK(std::fabs(marginal_quantile(0.5, m) - t.location) <
          1e-9 * std::max(1.0, std::sqrt(t.scale)));
    const double p = rng.uniform(0.01, 0.99);
    CHECK(marginal_quantile(p, m) + marginal_quantile(1.0 - p, m) ==
          doctest::Approx(2.0 * t.location).epsilon(1e-8));
  }
}

TEST_CASE("marginal quantile rejects p outside (0,1)") {
  const EvidentialOutput m{0.0, 1.0, 2.0, 1.0};
  CHECK_THROWS_AS(marginal_quantile(0.0, m), std::invalid_argument);
  CHECK_THROWS_AS(marginal_quantile(1.0, m), std::invalid_argument);
  CHECK_THROWS_AS(marginal_quantile(-0.2, m), std::invalid_argument);
}

TEST_CASE("affine transform maps the NIG parameters consistently") {
  Rng rng(28);
  for (int i = 0; i < 100; ++i) {
    const EvidentialOutput m = testutil::random_output(rng, rng.uniform(-5, 5));
    const double scale = rng.uniform(0.1, 4.0);
    const double shift = rng.uniform(-3.0, 3.0);
    const EvidentialOutput t = affine_transformed(m, scale, shift);
    CHECK(t.gamma == doctest::Approx(scale * m.gamma + shift).epsilon(1e-14));
    CHECK(t.nu == m.nu);
    CHECK(t.alpha == m.alpha);
    const PredictiveSummary s0 = predictive_summary(m);
    const PredictiveSummary s1 = predictive_summary(t);
    CHECK(s1.aleatoric ==
          doctest::Approx(scale * scale * s0.aleatoric).epsilon(1e-12));
    CHECK(s1.epistemic ==
          doctest::Approx(scale * scale * s0.epistemic).epsilon(1e-12));
    // the marginal transforms along: F_t(scale*y + shift) = F_m(y)
    const double y = rng.uniform(-5.0, 5.0);
    CHECK(marginal_cdf(scale * y + shift, t) ==
          doctest::Approx(marginal_cdf(y, m)).epsilon(1e-10));
  }
}
