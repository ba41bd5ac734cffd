#include "mtenet/losses.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

#include "mtenet/special_functions.hpp"

namespace mtenet {

double nll_loss(double y, const EvidentialOutput& m) {
  const double res = m.gamma - y;
  const double spread = 2.0 * m.beta * (1.0 + m.nu);
  return 0.5 * std::log(std::numbers::pi / m.nu) -
         m.alpha * std::log(spread) +
         (m.alpha + 0.5) * std::log(res * res * m.nu + spread) +
         log_gamma(m.alpha) - log_gamma(m.alpha + 0.5);
}

LossPartials nll_partials(double y, const EvidentialOutput& m) {
  const double res = m.gamma - y;
  const double res2 = res * res;
  const double spread = 2.0 * m.beta * (1.0 + m.nu);
  const double quad = res2 * m.nu + spread;
  LossPartials p;
  p.d_gamma = (2.0 * m.alpha + 1.0) * res * m.nu / quad;
  p.d_nu = -0.5 / m.nu - m.alpha / (m.nu + 1.0) +
           (m.alpha + 0.5) * (res2 + 2.0 * m.beta) / quad;
  p.d_alpha = std::log1p(res2 * m.nu / spread) + digamma(m.alpha) -
              digamma(m.alpha + 0.5);
  p.d_beta = -m.alpha / m.beta + (m.alpha + 0.5) * 2.0 * (1.0 + m.nu) / quad;
  return p;
}

ThresholdPair thresholds(const EvidentialOutput& m) {
  const double u_nu = m.beta * (m.nu + 1.0) / (m.alpha * m.nu);
  const double u_alpha = 2.0 * m.beta * (1.0 + m.nu) / m.nu *
                         std::expm1(digamma(m.alpha + 0.5) - digamma(m.alpha));
  return {u_nu, u_alpha};
}

ScalarLoss plain_mse(double y, const EvidentialOutput& m) {
  const double res = m.gamma - y;
  return {res * res, 2.0 * res};
}

RegularizerLoss evidence_regularizer(double y, const EvidentialOutput& m) {
  const double res = m.gamma - y;
  const double evidence = 2.0 * m.nu + m.alpha;
  RegularizerLoss r;
  r.loss = std::fabs(res) * evidence;
  if (res != 0.0) {
    r.partials.d_gamma = res > 0.0 ? evidence : -evidence;
    r.partials.d_nu = 2.0 * std::fabs(res);
    r.partials.d_alpha = std::fabs(res);
  }
  r.partials.d_beta = 0.0;
  return r;
}

LipschitzMseBatch lipschitz_mse_batch(std::span<const double> ys,
                                      std::span<const EvidentialOutput> ms) {
  if (ys.empty()) {
    throw std::invalid_argument("lipschitz_mse_batch: empty batch");
  }
  if (ys.size() != ms.size()) {
    throw std::invalid_argument("lipschitz_mse_batch: size mismatch");
  }
  double u = std::numeric_limits<double>::infinity();
  for (const auto& m : ms) {
    const ThresholdPair t = thresholds(m);
    u = std::min(u, std::min(t.u_nu, t.u_alpha));
  }
  const double root_u = std::sqrt(u);

  LipschitzMseBatch out;
  out.threshold = u;
  out.d_gamma.resize(ys.size());
  double sum = 0.0;
  for (std::size_t i = 0; i < ys.size(); ++i) {
    const double res = ms[i].gamma - ys[i];
    const double res2 = res * res;
    if (res2 < u) {
      sum += res2;
      out.d_gamma[i] = 2.0 * res;
    } else {
      sum += 2.0 * root_u * std::fabs(res) - u;
      out.d_gamma[i] = res > 0.0 ? 2.0 * root_u : -2.0 * root_u;
    }
  }
  out.loss = sum / static_cast<double>(ys.size());
  return out;
}

ObjectiveBreakdown total_objective(std::span<const double> ys,
                                   std::span<const EvidentialOutput> ms,
                                   AuxLossKind kind, double reg_coeff) {
  if (ys.empty()) {
    throw std::invalid_argument("total_objective: empty batch");
  }
  if (ys.size() != ms.size()) {
    throw std::invalid_argument("total_objective: size mismatch");
  }
  if (reg_coeff < 0.0) {
    throw std::invalid_argument("total_objective: reg_coeff must be >= 0");
  }
  const std::size_t n = ys.size();
  ObjectiveBreakdown out;
  out.nll_partials.resize(n);
  out.aux_partials.resize(n);
  out.reg_partials.resize(n);

  LipschitzMseBatch lip;
  if (kind == AuxLossKind::lipschitz_mse) {
    lip = lipschitz_mse_batch(ys, ms);
  }

  double nll_sum = 0.0;
  double aux_sum = 0.0;
  double reg_sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    nll_sum += nll_loss(ys[i], ms[i]);
    out.nll_partials[i] = nll_partials(ys[i], ms[i]);

    switch (kind) {
      case AuxLossKind::none:
        break;
      case AuxLossKind::plain_mse: {
        const ScalarLoss s = plain_mse(ys[i], ms[i]);
        aux_sum += s.loss;
        out.aux_partials[i].d_gamma = s.d_gamma;
        break;
      }
      case AuxLossKind::lipschitz_mse:
        out.aux_partials[i].d_gamma = lip.d_gamma[i];
        break;
    }

    const RegularizerLoss r = evidence_regularizer(ys[i], ms[i]);
    reg_sum += reg_coeff * r.loss;
    out.reg_partials[i] = {reg_coeff * r.partials.d_gamma,
                           reg_coeff * r.partials.d_nu,
                           reg_coeff * r.partials.d_alpha,
                           reg_coeff * r.partials.d_beta};
  }

  out.nll = nll_sum / static_cast<double>(n);
  out.aux = kind == AuxLossKind::lipschitz_mse
                ? lip.loss
                : aux_sum / static_cast<double>(n);
  out.reg = reg_sum / static_cast<double>(n);
  out.total = out.nll + out.aux + out.reg;
  return out;
}

}  // namespace mtenet
