#ifndef MTENET_TESTS_TEST_UTIL_HPP
#define MTENET_TESTS_TEST_UTIL_HPP

#include <cmath>
#include <functional>

#include "mtenet/nig.hpp"
#include "mtenet/rng.hpp"

namespace mtenet::testutil {

// Recursive adaptive Simpson quadrature.
inline double adaptive_simpson_step(const std::function<double(double)>& f,
                                    double a, double b, double fa, double fb,
                                    double fm, double whole, double tol,
                                    int depth) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m);
  const double rm = 0.5 * (m + b);
  const double flm = f(lm);
  const double frm = f(rm);
  const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  const double delta = left + right - whole;
  if (depth <= 0 || std::fabs(delta) <= 15.0 * tol) {
    return left + right + delta / 15.0;
  }
  return adaptive_simpson_step(f, a, m, fa, fm, flm, left, 0.5 * tol,
                               depth - 1) +
         adaptive_simpson_step(f, m, b, fm, fb, frm, right, 0.5 * tol,
                               depth - 1);
}

inline double adaptive_simpson(const std::function<double(double)>& f,
                               double a, double b, double tol = 1e-9,
                               int depth = 40) {
  const double fa = f(a);
  const double fb = f(b);
  const double fm = f(0.5 * (a + b));
  const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  return adaptive_simpson_step(f, a, b, fa, fb, fm, whole, tol, depth);
}

// Central difference with the audit step rule.
inline double central_difference(const std::function<double(double)>& f,
                                 double x) {
  const double h = 1e-6 * std::max(1.0, std::fabs(x));
  return (f(x + h) - f(x - h)) / (2.0 * h);
}

// |a - b| relative to max(1, |b|).
inline double unit_floor_deviation(double a, double b) {
  return std::fabs(a - b) / std::max(1.0, std::fabs(b));
}

inline EvidentialOutput random_output(Rng& rng, double gamma) {
  return {gamma, rng.log_uniform(1e-3, 10.0), rng.uniform(1.01, 10.0),
          rng.log_uniform(1e-3, 10.0)};
}

}  // namespace mtenet::testutil

#endif  // MTENET_TESTS_TEST_UTIL_HPP
