#ifndef MTENET_NET_HPP
#define MTENET_NET_HPP

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "mtenet/losses.hpp"
#include "mtenet/nig.hpp"

namespace mtenet {

enum class Activation { tanh, relu };

struct NetConfig {
  int input_dim = 1;
  std::vector<int> hidden = {100, 100, 100};
  Activation activation = Activation::tanh;
  std::uint64_t seed = 0;
};

// Flat parameter storage in canonical order: layer-major, each layer's
// weights (row-major, out x in) before its biases, hidden layers first and
// the 4-output head layer last. Gradient vectors live in the same space.
using ParamVector = std::vector<double>;

// Subset of the head outputs a gradient vector is restricted to.
struct HeadSet {
  bool gamma = false;
  bool nu = false;
  bool alpha = false;
  bool beta = false;

  static constexpr HeadSet all() { return {true, true, true, true}; }
  static constexpr HeadSet point() { return {true, false, false, false}; }
  static constexpr HeadSet uncertainty() { return {false, true, true, true}; }
  constexpr bool empty() const { return !(gamma || nu || alpha || beta); }
};

// Per-sample forward state kept for the backward pass.
struct ForwardTrace {
  std::vector<double> input;
  std::vector<std::vector<double>> hidden;  // post-activation per layer
  std::array<double, 4> raw_head = {};      // head outputs before activation
};

// Fully connected network with a 4-output evidential head. The raw head
// outputs (r_gamma, r_nu, r_alpha, r_beta) map to
//   gamma = r_gamma
//   nu    = softplus(r_nu) + 1e-6
//   alpha = softplus(r_alpha) + 1 + 1e-6
//   beta  = softplus(r_beta) + 1e-6
// so every forward output satisfies the EvidentialOutput invariants.
class EvidentialNet {
 public:
  explicit EvidentialNet(NetConfig config);

  const NetConfig& config() const { return config_; }
  std::size_t param_count() const { return param_count_; }

  // Glorot-uniform weights (bound sqrt(6 / (fan_in + fan_out))), zero
  // biases; deterministic in config.seed.
  ParamVector init_params() const;

  EvidentialOutput forward(const ParamVector& params,
                           std::span<const double> x) const;
  EvidentialOutput forward(const ParamVector& params,
                           std::span<const double> x,
                           ForwardTrace& trace) const;

  // Gradient in parameter space of sum_{head in heads} partial(head) * head,
  // i.e. reverse mode seeded only with the selected heads' partials. The
  // results for disjoint head sets add up to the full-head gradient.
  ParamVector head_gradient(const ParamVector& params,
                            std::span<const double> x,
                            const LossPartials& partials, HeadSet heads) const;

  // Same, reusing a recorded trace and accumulating into grad (+=).
  void accumulate_head_gradient(const ParamVector& params,
                                const ForwardTrace& trace,
                                const LossPartials& partials, HeadSet heads,
                                ParamVector& grad) const;

 private:
  struct LayerShape {
    int in;
    int out;
    std::size_t w_off;
    std::size_t b_off;
  };

  NetConfig config_;
  std::vector<LayerShape> layers_;
  std::size_t param_count_ = 0;
};

// a.b / (|a||b|); std::nullopt when either norm is below 1e-12.
std::optional<double> cosine(const ParamVector& a, const ParamVector& b);

// Checkpoint file: a text header (format tag, input_dim, hidden sizes,
// activation, seed, parameter count) followed by one parameter per line,
// printed with 17 significant digits so values round-trip exactly.
void save_checkpoint(const std::string& path, const NetConfig& config,
                     const ParamVector& params);
std::pair<NetConfig, ParamVector> load_checkpoint(const std::string& path);

}  // namespace mtenet

#endif  // MTENET_NET_HPP
