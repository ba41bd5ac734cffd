#include "mtenet/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "mtenet/losses.hpp"

namespace mtenet {

double rmse(std::span<const double> ys, std::span<const double> preds) {
  if (ys.empty()) throw std::invalid_argument("rmse: empty input");
  if (ys.size() != preds.size()) {
    throw std::invalid_argument("rmse: size mismatch");
  }
  double sum = 0.0;
  for (std::size_t i = 0; i < ys.size(); ++i) {
    const double d = ys[i] - preds[i];
    sum += d * d;
  }
  return std::sqrt(sum / static_cast<double>(ys.size()));
}

std::optional<double> concordance_index(std::span<const double> ys,
                                        std::span<const double> preds) {
  if (ys.size() != preds.size()) {
    throw std::invalid_argument("concordance_index: size mismatch");
  }
  if (ys.size() < 2) {
    throw std::invalid_argument("concordance_index: need at least two samples");
  }
  double pairs = 0.0;
  double score = 0.0;
  for (std::size_t i = 0; i < ys.size(); ++i) {
    for (std::size_t j = 0; j < ys.size(); ++j) {
      if (!(ys[i] > ys[j])) continue;
      pairs += 1.0;
      const double d = preds[i] - preds[j];
      if (d > 0.0) {
        score += 1.0;
      } else if (d == 0.0) {
        score += 0.5;
      }
    }
  }
  if (pairs == 0.0) return std::nullopt;
  return score / pairs;
}

double ece(std::span<const double> ys, std::span<const EvidentialOutput> ms) {
  if (ys.empty()) throw std::invalid_argument("ece: empty input");
  if (ys.size() != ms.size()) throw std::invalid_argument("ece: size mismatch");

  // y in [q((1-P)/2), q((1+P)/2)] iff |2 F(y) - 1| <= P, so one cdf
  // evaluation per sample fixes the coverage at every level.
  std::vector<double> dev(ys.size());
  for (std::size_t i = 0; i < ys.size(); ++i) {
    dev[i] = std::fabs(2.0 * marginal_cdf(ys[i], ms[i]) - 1.0);
  }
  std::sort(dev.begin(), dev.end());

  const double n = static_cast<double>(ys.size());
  double sum = 0.0;
  for (int level = 1; level <= 100; ++level) {
    const double p = level / 100.0;
    const auto covered = std::upper_bound(dev.begin(), dev.end(), p);
    const double acc = static_cast<double>(covered - dev.begin()) / n;
    sum += std::fabs(acc - p);
  }
  return sum / 100.0;
}

double mean_nll(std::span<const double> ys,
                std::span<const EvidentialOutput> ms) {
  if (ys.empty()) throw std::invalid_argument("mean_nll: empty input");
  if (ys.size() != ms.size()) {
    throw std::invalid_argument("mean_nll: size mismatch");
  }
  double sum = 0.0;
  for (std::size_t i = 0; i < ys.size(); ++i) sum += nll_loss(ys[i], ms[i]);
  return sum / static_cast<double>(ys.size());
}

double auroc(std::span<const double> id_scores,
             std::span<const double> ood_scores) {
  if (id_scores.empty() || ood_scores.empty()) {
    throw std::invalid_argument("auroc: both score sets must be nonempty");
  }
  struct Tagged {
    double score;
    bool ood;
  };
  std::vector<Tagged> pool;
  pool.reserve(id_scores.size() + ood_scores.size());
  for (const double s : id_scores) pool.push_back({s, false});
  for (const double s : ood_scores) pool.push_back({s, true});
  std::sort(pool.begin(), pool.end(),
            [](const Tagged& a, const Tagged& b) { return a.score < b.score; });

  // Average ranks across tie groups, then the Mann-Whitney U relation.
  double rank_sum_ood = 0.0;
  std::size_t i = 0;
  while (i < pool.size()) {
    std::size_t j = i;
    while (j < pool.size() && pool[j].score == pool[i].score) ++j;
    const double avg_rank = 0.5 * static_cast<double>(i + 1 + j);  // 1-based
    for (std::size_t k = i; k < j; ++k) {
      if (pool[k].ood) rank_sum_ood += avg_rank;
    }
    i = j;
  }
  const double n_ood = static_cast<double>(ood_scores.size());
  const double n_id = static_cast<double>(id_scores.size());
  const double u = rank_sum_ood - n_ood * (n_ood + 1.0) / 2.0;
  return u / (n_id * n_ood);
}

}  // namespace mtenet
