#include "mtenet/nig.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "mtenet/special_functions.hpp"

namespace mtenet {

namespace {

constexpr int kQuantileMaxIter = 200;
constexpr double kQuantileTol = 1e-12;
constexpr double kBracketSpan = 1e6;

void check_student_t(const StudentTParams& t) {
  if (!(t.scale > 0.0) || !(t.dof > 0.0)) {
    throw std::domain_error("student_t: scale and dof must be > 0");
  }
}

}  // namespace

EvidentialOutput::EvidentialOutput(double gamma_, double nu_, double alpha_,
                                   double beta_)
    : gamma(gamma_), nu(nu_), alpha(alpha_), beta(beta_) {
  if (!std::isfinite(gamma) || !std::isfinite(nu) || !std::isfinite(alpha) ||
      !std::isfinite(beta)) {
    throw std::invalid_argument("EvidentialOutput: parameters must be finite");
  }
  if (!(nu > 0.0)) {
    throw std::invalid_argument("EvidentialOutput: nu must be > 0");
  }
  if (!(alpha > 1.0 + kAlphaMargin)) {
    throw std::invalid_argument("EvidentialOutput: alpha must exceed 1");
  }
  if (!(beta > 0.0)) {
    throw std::invalid_argument("EvidentialOutput: beta must be > 0");
  }
}

PredictiveSummary predictive_summary(const EvidentialOutput& m) {
  if (!(m.alpha > 1.0)) {
    throw std::domain_error("predictive_summary: alpha must exceed 1");
  }
  const double aleatoric = m.beta / (m.alpha - 1.0);
  return {m.gamma, aleatoric, aleatoric / m.nu};
}

StudentTParams marginal_params(const EvidentialOutput& m) {
  return {m.gamma, m.beta * (1.0 + m.nu) / (m.nu * m.alpha), 2.0 * m.alpha};
}

double student_t_log_pdf(const StudentTParams& t, double y) {
  check_student_t(t);
  const double n = t.dof;
  const double z2 = (y - t.location) * (y - t.location) / t.scale;
  return log_gamma(0.5 * (n + 1.0)) - log_gamma(0.5 * n) -
         0.5 * std::log(n * std::numbers::pi * t.scale) -
         0.5 * (n + 1.0) * std::log1p(z2 / n);
}

double student_t_cdf(const StudentTParams& t, double y) {
  check_student_t(t);
  const double z = (y - t.location) / std::sqrt(t.scale);
  if (z == 0.0) return 0.5;
  const double z2 = z * z;
  if (z2 < t.dof) {
    // central form; z^2/(dof + z^2) keeps full precision near the median,
    // where dof/(dof + z^2) would round to 1
    const double half = 0.5 * reg_incomplete_beta(0.5, 0.5 * t.dof,
                                                  z2 / (t.dof + z2));
    return z > 0.0 ? 0.5 + half : 0.5 - half;
  }
  const double tail =
      0.5 * reg_incomplete_beta(0.5 * t.dof, 0.5, t.dof / (t.dof + z2));
  return z > 0.0 ? 1.0 - tail : tail;
}

double student_t_quantile(const StudentTParams& t, double p) {
  check_student_t(t);
  if (!(p > 0.0) || !(p < 1.0)) {
    throw std::invalid_argument("student_t_quantile: p must lie in (0, 1)");
  }
  double lo = t.location - kBracketSpan * t.scale;
  double hi = t.location + kBracketSpan * t.scale;
  // Widen the bracket in the rare case the fixed span does not enclose p.
  while (student_t_cdf(t, lo) > p) lo = t.location + 2.0 * (lo - t.location);
  while (student_t_cdf(t, hi) < p) hi = t.location + 2.0 * (hi - t.location);
  for (int i = 0; i < kQuantileMaxIter && hi - lo > kQuantileTol; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (student_t_cdf(t, mid) < p) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

double log_marginal_pdf(double y, const EvidentialOutput& m) {
  return student_t_log_pdf(marginal_params(m), y);
}

double marginal_cdf(double y, const EvidentialOutput& m) {
  return student_t_cdf(marginal_params(m), y);
}

double marginal_quantile(double p, const EvidentialOutput& m) {
  return student_t_quantile(marginal_params(m), p);
}

EvidentialOutput affine_transformed(const EvidentialOutput& m, double scale,
                                    double shift) {
  if (scale == 0.0) {
    throw std::invalid_argument("affine_transformed: scale must be nonzero");
  }
  return {scale * m.gamma + shift, m.nu, m.alpha, scale * scale * m.beta};
}

}  // namespace mtenet
