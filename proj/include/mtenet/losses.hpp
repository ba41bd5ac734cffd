#ifndef MTENET_LOSSES_HPP
#define MTENET_LOSSES_HPP

#include <span>
#include <vector>

#include "mtenet/nig.hpp"

namespace mtenet {

// Partial derivatives of a scalar loss with respect to the four head outputs.
struct LossPartials {
  double d_gamma = 0.0;
  double d_nu = 0.0;
  double d_alpha = 0.0;
  double d_beta = 0.0;
};

// Squared-error thresholds beyond which the marginal NLL inflates the
// uncertainty: residual^2 > u_nu pushes d_nu positive, residual^2 > u_alpha
// pushes d_alpha positive.
struct ThresholdPair {
  double u_nu;
  double u_alpha;
};

// Auxiliary accuracy loss added to the NLL: none (plain evidential net),
// the unmodified squared error, or the slope-capped squared error.
enum class AuxLossKind { none, plain_mse, lipschitz_mse };

// Negative log marginal likelihood of y under m.
double nll_loss(double y, const EvidentialOutput& m);

// Closed-form partials of nll_loss with respect to (gamma, nu, alpha, beta).
LossPartials nll_partials(double y, const EvidentialOutput& m);

// u_nu = beta (nu + 1) / (alpha nu);
// u_alpha = 2 beta (1 + nu) / nu * (exp(Psi(alpha + 1/2) - Psi(alpha)) - 1).
ThresholdPair thresholds(const EvidentialOutput& m);

struct ScalarLoss {
  double loss;
  double d_gamma;
};

// (y - gamma)^2 with its gamma partial; nu, alpha, beta receive no gradient.
ScalarLoss plain_mse(double y, const EvidentialOutput& m);

struct RegularizerLoss {
  double loss;
  LossPartials partials;
};

// |y - gamma| (2 nu + alpha). The gamma partial at y == gamma is the zero
// subgradient.
RegularizerLoss evidence_regularizer(double y, const EvidentialOutput& m);

struct LipschitzMseBatch {
  double loss = 0.0;            // batch mean
  double threshold = 0.0;       // batch-wide minimum of min(u_nu, u_alpha)
  std::vector<double> d_gamma;  // per item, before the 1/N reduction
};

// Slope-capped squared error. The cap threshold is the batch minimum of the
// per-item min(u_nu, u_alpha) and is treated as a constant under
// differentiation: no gradient reaches nu, alpha or beta. Per item the loss
// is residual^2 when residual^2 < threshold and otherwise the linear
// continuation 2 sqrt(threshold) |residual| - threshold, so the magnitude of
// the gamma partial never exceeds 2 sqrt(threshold).
LipschitzMseBatch lipschitz_mse_batch(std::span<const double> ys,
                                      std::span<const EvidentialOutput> ms);

// Batch objective: mean of nll + aux + reg_coeff * regularizer, with the
// per-item partials kept separate per source so head-restricted gradient
// vectors can be assembled downstream. The reg slots are already scaled by
// reg_coeff; summing the three slots item-wise gives the partials of the
// total.
struct ObjectiveBreakdown {
  double total = 0.0;
  double nll = 0.0;
  double aux = 0.0;
  double reg = 0.0;  // includes the coefficient
  std::vector<LossPartials> nll_partials;
  std::vector<LossPartials> aux_partials;
  std::vector<LossPartials> reg_partials;
};

ObjectiveBreakdown total_objective(std::span<const double> ys,
                                   std::span<const EvidentialOutput> ms,
                                   AuxLossKind kind, double reg_coeff);

}  // namespace mtenet

#endif  // MTENET_LOSSES_HPP
