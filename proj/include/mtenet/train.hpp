#ifndef MTENET_TRAIN_HPP
#define MTENET_TRAIN_HPP

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "mtenet/data.hpp"
#include "mtenet/losses.hpp"
#include "mtenet/metrics.hpp"
#include "mtenet/net.hpp"

namespace mtenet {

struct TrainConfig {
  double learning_rate = 0.01;
  double weight_decay = 1e-3;
  double reg_coeff = 1e-2;
  int batch_size = 128;
  int epochs = 100;
  AuxLossKind aux = AuxLossKind::lipschitz_mse;
  std::uint64_t seed = 0;
  int conflict_window = 500;
};

// Per-iteration cosine between the auxiliary-loss gradient vector and the
// NLL total gradient vector, with a moving average over the most recent
// `window` defined entries. Undefined cosines (a vanishing gradient on
// either side) are recorded as missing and excluded from the average.
struct ConflictTrace {
  struct Entry {
    long iteration;
    std::optional<double> cosine;
    std::optional<double> moving_avg;
  };
  std::vector<Entry> entries;
  int window = 500;
};

struct EpochLog {
  int epoch;
  double nll;
  double aux;
  double reg;  // includes the coefficient
  double total;
};

struct TrainResult {
  ParamVector params;
  ConflictTrace trace;
  std::vector<EpochLog> losses;
};

struct AdamState {
  ParamVector first_moment;
  ParamVector second_moment;
  long step = 0;
};

// One Adam update (beta1 0.9, beta2 0.999, eps 1e-8) with decoupled weight
// decay applied as params -= lr * wd * params before the moment update.
void adam_step(ParamVector& params, const ParamVector& grad, AdamState& state,
               double learning_rate, double weight_decay);

// Mean gradient vectors of one minibatch, split by loss source. The reg
// vector carries the regularizer coefficient; the applied update direction
// is the element-wise sum of the three.
struct BatchGradients {
  ParamVector nll;
  ParamVector aux;
  ParamVector reg;
  ObjectiveBreakdown objective;
};

BatchGradients batch_gradients(const EvidentialNet& net,
                               const ParamVector& params, const Dataset& data,
                               std::span<const int> batch, AuxLossKind aux,
                               double reg_coeff);

// Minibatch training with a seeded shuffle per epoch (the final partial
// batch is kept). When an auxiliary loss is active, every iteration records
// cosine(aux gradient, NLL gradient) into the conflict trace.
TrainResult train(const Dataset& data, const NetConfig& net_config,
                  const TrainConfig& config);

// Metrics over a frozen parameter snapshot. When the dataset carries
// normalization statistics the report is computed in raw target units by
// de-normalizing both targets and head outputs.
MetricsReport evaluate(const EvidentialNet& net, const ParamVector& params,
                       const Dataset& data);

}  // namespace mtenet

#endif  // MTENET_TRAIN_HPP
