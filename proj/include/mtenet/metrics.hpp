#ifndef MTENET_METRICS_HPP
#define MTENET_METRICS_HPP

#include <cstdint>
#include <optional>
#include <span>

#include "mtenet/nig.hpp"

namespace mtenet {

struct MetricsReport {
  double rmse = 0.0;
  double mean_nll = 0.0;
  double ci = 0.0;
  double ece = 0.0;
  std::int64_t count = 0;
};

double rmse(std::span<const double> ys, std::span<const double> preds);

// Pair-ranking score over strictly ordered target pairs (y_i > y_j), with a
// correctly ordered prediction scoring 1, a tie 0.5, and a reversal 0.
// std::nullopt when no strictly ordered pair exists.
std::optional<double> concordance_index(std::span<const double> ys,
                                        std::span<const double> preds);

// Mean over the 100 central-interval levels P in {0.01, ..., 1.00} of
// |acc(P) - P|, where acc(P) is the fraction of targets inside the closed
// central P-probability interval of their own marginal. Membership is
// evaluated through the cdf: y lies in the interval iff |2 F(y) - 1| <= P.
double ece(std::span<const double> ys, std::span<const EvidentialOutput> ms);

// Batch mean of nll_loss.
double mean_nll(std::span<const double> ys,
                std::span<const EvidentialOutput> ms);

// P(ood > id) + P(ood == id)/2 via the Mann-Whitney U rank statistic.
double auroc(std::span<const double> id_scores,
             std::span<const double> ood_scores);

}  // namespace mtenet

#endif  // MTENET_METRICS_HPP
