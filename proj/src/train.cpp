#include "mtenet/train.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <numeric>
#include <stdexcept>

#include "mtenet/rng.hpp"

namespace mtenet {

namespace {

constexpr double kAdamBeta1 = 0.9;
constexpr double kAdamBeta2 = 0.999;
constexpr double kAdamEps = 1e-8;

LossPartials scaled(const LossPartials& p, double s) {
  return {s * p.d_gamma, s * p.d_nu, s * p.d_alpha, s * p.d_beta};
}

}  // namespace

void adam_step(ParamVector& params, const ParamVector& grad, AdamState& state,
               double learning_rate, double weight_decay) {
  if (grad.size() != params.size()) {
    throw std::invalid_argument("adam_step: shape mismatch");
  }
  if (state.first_moment.empty()) {
    state.first_moment.assign(params.size(), 0.0);
    state.second_moment.assign(params.size(), 0.0);
  }
  if (state.first_moment.size() != params.size()) {
    throw std::invalid_argument("adam_step: state shape mismatch");
  }
  ++state.step;
  const double corr1 = 1.0 - std::pow(kAdamBeta1, state.step);
  const double corr2 = 1.0 - std::pow(kAdamBeta2, state.step);
  for (std::size_t i = 0; i < params.size(); ++i) {
    if (weight_decay != 0.0) {
      params[i] -= learning_rate * weight_decay * params[i];
    }
    double& m = state.first_moment[i];
    double& v = state.second_moment[i];
    m = kAdamBeta1 * m + (1.0 - kAdamBeta1) * grad[i];
    v = kAdamBeta2 * v + (1.0 - kAdamBeta2) * grad[i] * grad[i];
    params[i] -= learning_rate * (m / corr1) / (std::sqrt(v / corr2) + kAdamEps);
  }
}

BatchGradients batch_gradients(const EvidentialNet& net,
                               const ParamVector& params, const Dataset& data,
                               std::span<const int> batch, AuxLossKind aux,
                               double reg_coeff) {
  if (batch.empty()) {
    throw std::invalid_argument("batch_gradients: empty batch");
  }
  const std::size_t n = batch.size();
  std::vector<ForwardTrace> traces(n);
  std::vector<EvidentialOutput> ms;
  ms.reserve(n);
  std::vector<double> ys(n);
  for (std::size_t i = 0; i < n; ++i) {
    const int idx = batch[i];
    ms.push_back(net.forward(params, data.inputs[idx], traces[i]));
    ys[i] = data.targets[idx];
  }

  BatchGradients bg{ParamVector(net.param_count(), 0.0),
                    ParamVector(net.param_count(), 0.0),
                    ParamVector(net.param_count(), 0.0),
                    total_objective(ys, ms, aux, reg_coeff)};

  const double inv_n = 1.0 / static_cast<double>(n);
  for (std::size_t i = 0; i < n; ++i) {
    net.accumulate_head_gradient(params, traces[i],
                                 scaled(bg.objective.nll_partials[i], inv_n),
                                 HeadSet::all(), bg.nll);
    if (aux != AuxLossKind::none) {
      net.accumulate_head_gradient(params, traces[i],
                                   scaled(bg.objective.aux_partials[i], inv_n),
                                   HeadSet::point(), bg.aux);
    }
    net.accumulate_head_gradient(params, traces[i],
                                 scaled(bg.objective.reg_partials[i], inv_n),
                                 HeadSet::all(), bg.reg);
  }
  return bg;
}

TrainResult train(const Dataset& data, const NetConfig& net_config,
                  const TrainConfig& config) {
  if (data.size() == 0) throw std::invalid_argument("train: empty dataset");
  if (data.feature_dim() != static_cast<std::size_t>(net_config.input_dim)) {
    throw std::invalid_argument("train: dataset dim != net input_dim");
  }
  if (config.batch_size <= 0 || config.epochs <= 0) {
    throw std::invalid_argument("train: batch_size and epochs must be > 0");
  }
  if (!(config.learning_rate > 0.0) || config.weight_decay < 0.0 ||
      config.reg_coeff < 0.0 || config.conflict_window < 1) {
    throw std::invalid_argument("train: bad hyperparameter");
  }

  const EvidentialNet net(net_config);
  ParamVector params = net.init_params();
  AdamState state;
  Rng shuffle_rng(config.seed);

  TrainResult result;
  result.trace.window = config.conflict_window;

  std::deque<double> recent;
  double recent_sum = 0.0;

  std::vector<int> order(data.size());
  std::iota(order.begin(), order.end(), 0);

  long iteration = 0;
  ParamVector total_grad(net.param_count());
  for (int epoch = 1; epoch <= config.epochs; ++epoch) {
    shuffle_rng.shuffle(order);
    double epoch_nll = 0.0;
    double epoch_aux = 0.0;
    double epoch_reg = 0.0;
    int batches = 0;
    for (std::size_t start = 0; start < order.size();
         start += static_cast<std::size_t>(config.batch_size)) {
      const std::size_t len = std::min(
          static_cast<std::size_t>(config.batch_size), order.size() - start);
      const BatchGradients bg =
          batch_gradients(net, params, data,
                          std::span<const int>(order.data() + start, len),
                          config.aux, config.reg_coeff);

      if (config.aux != AuxLossKind::none) {
        const std::optional<double> cs = cosine(bg.aux, bg.nll);
        if (cs) {
          recent.push_back(*cs);
          recent_sum += *cs;
          if (recent.size() > static_cast<std::size_t>(config.conflict_window)) {
            recent_sum -= recent.front();
            recent.pop_front();
          }
        }
        result.trace.entries.push_back(
            {iteration, cs,
             recent.empty()
                 ? std::nullopt
                 : std::optional<double>(recent_sum /
                                         static_cast<double>(recent.size()))});
      }

      for (std::size_t i = 0; i < total_grad.size(); ++i) {
        total_grad[i] = bg.nll[i] + bg.aux[i] + bg.reg[i];
      }
      adam_step(params, total_grad, state, config.learning_rate,
                config.weight_decay);

      epoch_nll += bg.objective.nll;
      epoch_aux += bg.objective.aux;
      epoch_reg += bg.objective.reg;
      ++batches;
      ++iteration;
    }
    const double inv_b = 1.0 / static_cast<double>(batches);
    result.losses.push_back({epoch, epoch_nll * inv_b, epoch_aux * inv_b,
                             epoch_reg * inv_b,
                             (epoch_nll + epoch_aux + epoch_reg) * inv_b});
  }
  result.params = std::move(params);
  return result;
}

MetricsReport evaluate(const EvidentialNet& net, const ParamVector& params,
                       const Dataset& data) {
  if (data.size() == 0) throw std::invalid_argument("evaluate: empty dataset");

  std::vector<double> ys;
  std::vector<double> preds;
  std::vector<EvidentialOutput> ms;
  ys.reserve(data.size());
  preds.reserve(data.size());
  ms.reserve(data.size());
  for (std::size_t i = 0; i < data.size(); ++i) {
    EvidentialOutput m = net.forward(params, data.inputs[i]);
    double y = data.targets[i];
    if (data.normalization) {
      m = affine_transformed(m, data.normalization->target_std,
                             data.normalization->target_mean);
      y = denormalize_target(y, *data.normalization);
    }
    ys.push_back(y);
    preds.push_back(m.gamma);
    ms.push_back(m);
  }

  MetricsReport report;
  report.rmse = rmse(ys, preds);
  report.mean_nll = mean_nll(ys, ms);
  const std::optional<double> ci = concordance_index(ys, preds);
  if (!ci) {
    throw std::runtime_error(
        "evaluate: concordance index undefined (no strictly ordered targets)");
  }
  report.ci = *ci;
  report.ece = ece(ys, ms);
  report.count = static_cast<std::int64_t>(data.size());
  return report;
}

}  // namespace mtenet
