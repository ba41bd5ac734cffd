#include "mtenet/audit.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <limits>
#include <vector>

#include "mtenet/losses.hpp"
#include "mtenet/net.hpp"
#include "mtenet/rng.hpp"

namespace mtenet::audit {

namespace {

constexpr double kFdTol = 1e-5;
constexpr double kCosineTol = 1e-6;

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
      .count();
}

std::string describe_sample(double y, const EvidentialOutput& m) {
  char buf[160];
  std::snprintf(buf, sizeof(buf),
                "y=%.6g gamma=%.6g nu=%.6g alpha=%.6g beta=%.6g", y, m.gamma,
                m.nu, m.alpha, m.beta);
  return buf;
}

EvidentialOutput random_output(Rng& rng, double gamma) {
  return {gamma, rng.log_uniform(1e-3, 10.0), rng.uniform(1.01, 10.0),
          rng.log_uniform(1e-3, 10.0)};
}

// Central difference of nll_loss in one of the four head parameters.
double fd_partial(double y, const EvidentialOutput& m, int which) {
  double fields[4] = {m.gamma, m.nu, m.alpha, m.beta};
  const double h = 1e-6 * std::max(1.0, std::fabs(fields[which]));
  fields[which] += h;
  const EvidentialOutput hi{fields[0], fields[1], fields[2], fields[3]};
  fields[which] -= 2.0 * h;
  const EvidentialOutput lo{fields[0], fields[1], fields[2], fields[3]};
  return (nll_loss(y, hi) - nll_loss(y, lo)) / (2.0 * h);
}

SuiteResult run_finite_difference(const AuditConfig& config, Rng& rng) {
  SuiteResult result;
  result.pass = true;
  for (int s = 0; s < config.fd_samples; ++s) {
    const double residual = rng.uniform(-5.0, 5.0);
    const EvidentialOutput m = random_output(rng, residual);
    const double y = 0.0;  // residual = gamma - y
    LossPartials p = nll_partials(y, m);
    p.d_alpha += config.perturb_d_alpha;
    const double analytic[4] = {p.d_gamma, p.d_nu, p.d_alpha, p.d_beta};
    static const char* const names[4] = {"gamma", "nu", "alpha", "beta"};
    for (int which = 0; which < 4; ++which) {
      const double fd = fd_partial(y, m, which);
      const double dev =
          std::fabs(analytic[which] - fd) / std::max(1.0, std::fabs(fd));
      if (dev > result.worst) {
        result.worst = dev;
        char buf[64];
        std::snprintf(buf, sizeof(buf), "d_%s deviation %.3g at ",
                      names[which], dev);
        result.detail = buf + describe_sample(y, m);
      }
      if (dev > kFdTol) result.pass = false;
    }
  }
  if (result.pass) {
    char buf[96];
    std::snprintf(buf, sizeof(buf), "%d points, worst deviation %.3g",
                  config.fd_samples, result.worst);
    result.detail = buf;
  }
  return result;
}

SuiteResult run_sign_fuzz(const AuditConfig& config, Rng& rng) {
  SuiteResult result;
  result.pass = true;
  constexpr double kMargin = 1e-9;
  long checked = 0;
  for (int s = 0; s < config.fuzz_samples; ++s) {
    EvidentialOutput m = random_output(rng, 0.0);
    const ThresholdPair t = thresholds(m);
    double residual;
    if (s % 2 == 0) {
      residual = rng.uniform(-5.0, 5.0);
    } else {
      // Stress the region just above a threshold, down to a 1e-8 excess.
      const double base = (s % 4 == 1) ? t.u_nu : t.u_alpha;
      const double excess = rng.log_uniform(1e-8, 10.0);
      residual = std::sqrt(base * (1.0 + excess));
      if (rng.uniform() < 0.5) residual = -residual;
    }
    m = EvidentialOutput{residual, m.nu, m.alpha, m.beta};
    const double y = 0.0;
    const double res2 = residual * residual;
    const bool above_alpha = res2 > t.u_alpha * (1.0 + kMargin);
    const bool above_nu = res2 > t.u_nu * (1.0 + kMargin);
    if (!above_alpha && !above_nu) continue;
    const LossPartials p = nll_partials(y, m);
    if (above_alpha) {
      ++checked;
      if (!(p.d_alpha > 0.0)) {
        result.pass = false;
        result.detail = "d_alpha not positive at " + describe_sample(y, m);
        result.worst = std::min(result.worst, p.d_alpha);
      }
    }
    if (above_nu) {
      ++checked;
      if (!(p.d_nu > 0.0)) {
        result.pass = false;
        result.detail = "d_nu not positive at " + describe_sample(y, m);
        result.worst = std::min(result.worst, p.d_nu);
      }
    }
  }
  if (result.pass) {
    char buf[96];
    std::snprintf(buf, sizeof(buf), "%ld antecedents checked, 0 violations",
                  checked);
    result.detail = buf;
  }
  return result;
}

SuiteResult run_cosine_check(const AuditConfig& config, Rng& rng) {
  SuiteResult result;
  result.pass = true;
  int collected = 0;
  int attempts = 0;
  const int max_attempts = 50 * config.prop1_nets + 100;
  while (collected < config.prop1_nets && attempts < max_attempts) {
    ++attempts;
    NetConfig nc;
    nc.input_dim = 1 + static_cast<int>(rng.below(3));
    nc.hidden = {3 + static_cast<int>(rng.below(6))};
    if (rng.uniform() < 0.5) nc.hidden.push_back(3 + static_cast<int>(rng.below(6)));
    nc.activation = rng.uniform() < 0.5 ? Activation::tanh : Activation::relu;
    nc.seed = rng.raw();
    const EvidentialNet net(nc);
    const ParamVector params = net.init_params();

    std::vector<double> x(nc.input_dim);
    for (double& v : x) v = rng.uniform(-2.0, 2.0);
    const EvidentialOutput m = net.forward(params, x);
    double offset = rng.uniform(0.1, 2.0);
    if (rng.uniform() < 0.5) offset = -offset;
    const double y = m.gamma + offset;  // residual = -offset, never zero

    LossPartials mse_seed;
    mse_seed.d_gamma = plain_mse(y, m).d_gamma;
    LossPartials nll_seed;
    nll_seed.d_gamma = nll_partials(y, m).d_gamma;

    const ParamVector g_mse =
        net.head_gradient(params, x, mse_seed, HeadSet::point());
    const ParamVector g_nll =
        net.head_gradient(params, x, nll_seed, HeadSet::point());
    const std::optional<double> cs = cosine(g_mse, g_nll);
    if (!cs) continue;  // a vanishing gradient (dead relu path)
    ++collected;
    const double dev = std::fabs(*cs - 1.0);
    if (dev > result.worst) {
      result.worst = dev;
      char buf[96];
      std::snprintf(buf, sizeof(buf), "cosine %.12f at net seed %llu", *cs,
                    static_cast<unsigned long long>(nc.seed));
      result.detail = buf;
    }
    if (dev > kCosineTol) result.pass = false;
  }
  if (collected < config.prop1_nets) {
    result.pass = false;
    result.detail = "could not collect enough nonzero gradient pairs";
  } else if (result.pass) {
    char buf[96];
    std::snprintf(buf, sizeof(buf), "%d nets, worst |cos - 1| = %.3g",
                  collected, result.worst);
    result.detail = buf;
  }
  return result;
}

SuiteResult run_shrinkage() {
  SuiteResult result;
  result.pass = true;
  // residual^2 = 1, alpha = 2, beta = 1; nu sweeps 1e-1 down to 1e-8.
  double prev = std::numeric_limits<double>::infinity();
  double last = 0.0;
  std::string curve;
  for (int k = 1; k <= 8; ++k) {
    const double nu = std::pow(10.0, -k);
    const EvidentialOutput m{1.0, nu, 2.0, 1.0};
    const double mag = std::fabs(nll_partials(0.0, m).d_gamma);
    if (!(mag < prev)) {
      result.pass = false;
      char buf[96];
      std::snprintf(buf, sizeof(buf), "|d_gamma| not decreasing at nu=1e-%d", k);
      result.detail = buf;
    }
    prev = mag;
    last = mag;
  }
  if (!(last < 1e-6)) {
    result.pass = false;
    result.detail = "|d_gamma| at nu=1e-8 not below 1e-6";
  }
  result.worst = last;
  if (result.pass) {
    char buf[96];
    std::snprintf(buf, sizeof(buf),
                  "strictly decreasing, |d_gamma| = %.3g at nu=1e-8", last);
    result.detail = buf;
  }
  return result;
}

}  // namespace

AuditReport run_audit(const AuditConfig& config) {
  Rng rng(config.seed);
  AuditReport report;

  auto t0 = std::chrono::steady_clock::now();
  report.finite_difference = run_finite_difference(config, rng);
  report.fd_seconds = seconds_since(t0);

  t0 = std::chrono::steady_clock::now();
  report.sign_fuzz = run_sign_fuzz(config, rng);
  report.fuzz_seconds = seconds_since(t0);

  report.cosine_check = run_cosine_check(config, rng);
  report.shrinkage = run_shrinkage();

  report.pass = report.finite_difference.pass && report.sign_fuzz.pass &&
                report.cosine_check.pass && report.shrinkage.pass;
  return report;
}

}  // namespace mtenet::audit
