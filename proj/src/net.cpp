#include "mtenet/net.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "mtenet/rng.hpp"

namespace mtenet {

namespace {

constexpr double kHeadFloor = 1e-6;

double softplus(double z) {
  return std::max(z, 0.0) + std::log1p(std::exp(-std::fabs(z)));
}

double sigmoid(double z) {
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

double activate(Activation a, double z) {
  return a == Activation::tanh ? std::tanh(z) : std::max(z, 0.0);
}

// Derivative from the post-activation value.
double activate_grad(Activation a, double post) {
  return a == Activation::tanh ? 1.0 - post * post : (post > 0.0 ? 1.0 : 0.0);
}

}  // namespace

EvidentialNet::EvidentialNet(NetConfig config) : config_(std::move(config)) {
  if (config_.input_dim <= 0) {
    throw std::invalid_argument("EvidentialNet: input_dim must be positive");
  }
  if (config_.hidden.empty()) {
    throw std::invalid_argument("EvidentialNet: hidden sizes must be nonempty");
  }
  for (const int h : config_.hidden) {
    if (h <= 0) {
      throw std::invalid_argument(
          "EvidentialNet: hidden sizes must be positive");
    }
  }
  int in = config_.input_dim;
  std::size_t offset = 0;
  for (std::size_t l = 0; l <= config_.hidden.size(); ++l) {
    const int out =
        l < config_.hidden.size() ? config_.hidden[l] : 4;  // evidential head
    LayerShape shape{in, out, offset, offset + static_cast<std::size_t>(in) *
                                                   static_cast<std::size_t>(out)};
    offset = shape.b_off + static_cast<std::size_t>(out);
    layers_.push_back(shape);
    in = out;
  }
  param_count_ = offset;
}

ParamVector EvidentialNet::init_params() const {
  Rng rng(config_.seed);
  ParamVector params(param_count_, 0.0);
  for (const LayerShape& layer : layers_) {
    const double bound = std::sqrt(6.0 / (layer.in + layer.out));
    const std::size_t n_w =
        static_cast<std::size_t>(layer.in) * static_cast<std::size_t>(layer.out);
    for (std::size_t i = 0; i < n_w; ++i) {
      params[layer.w_off + i] = rng.uniform(-bound, bound);
    }
    // biases stay zero
  }
  return params;
}

EvidentialOutput EvidentialNet::forward(const ParamVector& params,
                                        std::span<const double> x) const {
  ForwardTrace trace;
  return forward(params, x, trace);
}

EvidentialOutput EvidentialNet::forward(const ParamVector& params,
                                        std::span<const double> x,
                                        ForwardTrace& trace) const {
  if (x.size() != static_cast<std::size_t>(config_.input_dim)) {
    throw std::invalid_argument("EvidentialNet::forward: input dim mismatch");
  }
  if (params.size() != param_count_) {
    throw std::invalid_argument(
        "EvidentialNet::forward: parameter count mismatch");
  }
  trace.input.assign(x.begin(), x.end());
  trace.hidden.assign(layers_.size() - 1, {});

  const std::vector<double>* cur = &trace.input;
  for (std::size_t l = 0; l + 1 < layers_.size(); ++l) {
    const LayerShape& layer = layers_[l];
    std::vector<double>& next = trace.hidden[l];
    next.resize(layer.out);
    for (int o = 0; o < layer.out; ++o) {
      const double* w = &params[layer.w_off +
                                static_cast<std::size_t>(o) * layer.in];
      double z = params[layer.b_off + o];
      for (int i = 0; i < layer.in; ++i) z += w[i] * (*cur)[i];
      next[o] = activate(config_.activation, z);
    }
    cur = &next;
  }

  const LayerShape& head = layers_.back();
  for (int o = 0; o < 4; ++o) {
    const double* w =
        &params[head.w_off + static_cast<std::size_t>(o) * head.in];
    double z = params[head.b_off + o];
    for (int i = 0; i < head.in; ++i) z += w[i] * (*cur)[i];
    trace.raw_head[o] = z;
  }
  return {trace.raw_head[0], softplus(trace.raw_head[1]) + kHeadFloor,
          softplus(trace.raw_head[2]) + 1.0 + kHeadFloor,
          softplus(trace.raw_head[3]) + kHeadFloor};
}

void EvidentialNet::accumulate_head_gradient(const ParamVector& params,
                                             const ForwardTrace& trace,
                                             const LossPartials& partials,
                                             HeadSet heads,
                                             ParamVector& grad) const {
  if (heads.empty()) {
    throw std::invalid_argument("head_gradient: empty head set");
  }
  if (grad.size() != param_count_) {
    throw std::invalid_argument("head_gradient: gradient size mismatch");
  }

  // Seed the backward pass with the selected heads' partials composed
  // through the head activations (gamma is linear, the rest are shifted
  // softplus with derivative sigmoid).
  std::array<double, 4> seed = {};
  if (heads.gamma) seed[0] = partials.d_gamma;
  if (heads.nu) seed[1] = partials.d_nu * sigmoid(trace.raw_head[1]);
  if (heads.alpha) seed[2] = partials.d_alpha * sigmoid(trace.raw_head[2]);
  if (heads.beta) seed[3] = partials.d_beta * sigmoid(trace.raw_head[3]);

  const LayerShape& head = layers_.back();
  const std::vector<double>& last =
      trace.hidden.empty() ? trace.input : trace.hidden.back();
  std::vector<double> delta(head.in, 0.0);
  for (int o = 0; o < 4; ++o) {
    const double s = seed[o];
    if (s == 0.0) continue;
    double* gw = &grad[head.w_off + static_cast<std::size_t>(o) * head.in];
    const double* w =
        &params[head.w_off + static_cast<std::size_t>(o) * head.in];
    for (int i = 0; i < head.in; ++i) {
      gw[i] += s * last[i];
      delta[i] += s * w[i];
    }
    grad[head.b_off + o] += s;
  }

  for (std::size_t l = layers_.size() - 1; l-- > 0;) {
    const LayerShape& layer = layers_[l];
    const std::vector<double>& post = trace.hidden[l];
    const std::vector<double>& below =
        l == 0 ? trace.input : trace.hidden[l - 1];
    for (int o = 0; o < layer.out; ++o) {
      delta[o] *= activate_grad(config_.activation, post[o]);
    }
    std::vector<double> next_delta(layer.in, 0.0);
    for (int o = 0; o < layer.out; ++o) {
      const double d = delta[o];
      if (d == 0.0) continue;
      double* gw = &grad[layer.w_off + static_cast<std::size_t>(o) * layer.in];
      const double* w =
          &params[layer.w_off + static_cast<std::size_t>(o) * layer.in];
      for (int i = 0; i < layer.in; ++i) {
        gw[i] += d * below[i];
        next_delta[i] += d * w[i];
      }
      grad[layer.b_off + o] += d;
    }
    delta = std::move(next_delta);
  }
}

ParamVector EvidentialNet::head_gradient(const ParamVector& params,
                                         std::span<const double> x,
                                         const LossPartials& partials,
                                         HeadSet heads) const {
  ForwardTrace trace;
  forward(params, x, trace);
  ParamVector grad(param_count_, 0.0);
  accumulate_head_gradient(params, trace, partials, heads, grad);
  return grad;
}

std::optional<double> cosine(const ParamVector& a, const ParamVector& b) {
  if (a.size() != b.size()) {
    throw std::invalid_argument("cosine: length mismatch");
  }
  double dot = 0.0;
  double na = 0.0;
  double nb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    dot += a[i] * b[i];
    na += a[i] * a[i];
    nb += b[i] * b[i];
  }
  constexpr double kMinNorm = 1e-12;
  if (std::sqrt(na) < kMinNorm || std::sqrt(nb) < kMinNorm) {
    return std::nullopt;
  }
  return dot / (std::sqrt(na) * std::sqrt(nb));
}

void save_checkpoint(const std::string& path, const NetConfig& config,
                     const ParamVector& params) {
  std::ofstream out(path);
  if (!out) {
    throw std::runtime_error("save_checkpoint: cannot open " + path);
  }
  out << "mtenet-checkpoint 1\n";
  out << "input_dim " << config.input_dim << "\n";
  out << "hidden";
  for (const int h : config.hidden) out << ' ' << h;
  out << "\n";
  out << "activation "
      << (config.activation == Activation::tanh ? "tanh" : "relu") << "\n";
  out << "seed " << config.seed << "\n";
  out << "params " << params.size() << "\n";
  char buf[64];
  for (const double v : params) {
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    out << buf << "\n";
  }
  if (!out) {
    throw std::runtime_error("save_checkpoint: write failed for " + path);
  }
}

std::pair<NetConfig, ParamVector> load_checkpoint(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw std::runtime_error("load_checkpoint: cannot open " + path);
  }
  auto fail = [&path](const std::string& what) -> std::runtime_error {
    return std::runtime_error("load_checkpoint: " + what + " in " + path);
  };

  std::string line;
  if (!std::getline(in, line) || line != "mtenet-checkpoint 1") {
    throw fail("bad format tag");
  }
  NetConfig config;
  config.hidden.clear();

  std::string key;
  if (!(in >> key >> config.input_dim) || key != "input_dim") {
    throw fail("missing input_dim");
  }
  if (!(in >> key) || key != "hidden") throw fail("missing hidden");
  std::getline(in, line);
  std::istringstream hs(line);
  int h = 0;
  while (hs >> h) config.hidden.push_back(h);
  std::string act;
  if (!(in >> key >> act) || key != "activation") throw fail("missing activation");
  if (act == "tanh") {
    config.activation = Activation::tanh;
  } else if (act == "relu") {
    config.activation = Activation::relu;
  } else {
    throw fail("unknown activation '" + act + "'");
  }
  if (!(in >> key >> config.seed) || key != "seed") throw fail("missing seed");
  std::size_t count = 0;
  if (!(in >> key >> count) || key != "params") throw fail("missing params");

  ParamVector params(count, 0.0);
  for (std::size_t i = 0; i < count; ++i) {
    if (!(in >> params[i])) throw fail("truncated parameter block");
  }
  const EvidentialNet net(config);  // validates the header fields
  if (net.param_count() != count) {
    throw fail("parameter count does not match the architecture");
  }
  return {config, std::move(params)};
}

}  // namespace mtenet
