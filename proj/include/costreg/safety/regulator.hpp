#pragma once

#include <vector>

#include "costreg/agents/agent.hpp"
#include "costreg/numeric/adam.hpp"
#include "costreg/numeric/dense_network.hpp"
#include "costreg/safety/cost_critics.hpp"

namespace costreg::safety {

struct RegulatorConfig {
  std::vector<int> hidden_sizes{256, 256};
  double learning_rate = 3e-4;
  bool scalar_mode = false;  // one shared factor broadcast to every action dimension
  double cost_norm_momentum = 0.99;
};

/// Trade-off weights of the regulator objective
///   beta * Q_c(s, rho * a) - lambda * mean_i log(rho_i + epsilon).
struct RegulatorWeights {
  double beta = 10.0;
  double lambda = 0.0015;
  double epsilon = 1e-6;
};

struct Scaling {
  Matrix rho;     // act_dim x B, every entry in (0, 1)
  Matrix scaled;  // rho * a, elementwise
};

struct RegulatorObjective {
  double loss = 0.0;
  ParameterSet gradient;
  Matrix rho;
};

/// Maps (s, a, c^) to per-dimension factors in (0, 1) through a sigmoid output layer.
/// The cost estimate is divided by (running mean of |c^| + 1) before entering the network.
class Regulator {
 public:
  Regulator(int observation_size, int action_size, RegulatorConfig config, Rng& init_rng);

  Scaling scale(const Matrix& observations, const Matrix& raw_actions, const Vector& cost_estimates) const;

  /// Loss and parameter gradient for fixed (s, a, c^) under the given cost surface.
  RegulatorObjective objective(const Matrix& observations, const Matrix& raw_actions, const Vector& cost_estimates,
                               const CostSurface& surface, const RegulatorWeights& weights) const;

  /// One Adam step on objective(). Also folds the batch into the cost normalizer.
  double step(const Matrix& observations, const Matrix& raw_actions, const Vector& cost_estimates,
              const CostSurface& surface, const RegulatorWeights& weights);

  double normalized_cost(double cost) const { return cost / (cost_scale_ + 1.0); }
  double cost_scale() const { return cost_scale_; }

  int observation_size() const { return obs_dim_; }
  int action_size() const { return act_dim_; }
  bool scalar_mode() const { return config_.scalar_mode; }
  const RegulatorConfig& config() const { return config_; }

  DenseNetwork& network() { return net_; }
  const DenseNetwork& network() const { return net_; }

  void save(Checkpoint& ckpt) const;
  void load(const Checkpoint& ckpt);

 private:
  Matrix inputs(const Matrix& observations, const Matrix& raw_actions, const Vector& cost_estimates) const;
  Matrix broadcast(const Matrix& out) const;

  int obs_dim_;
  int act_dim_;
  RegulatorConfig config_;
  DenseNetwork net_;
  AdamState opt_;
  double cost_scale_ = 0.0;
};

/// Full regulator update: fresh a ~ pi(.|s) (policy frozen), c^ from the online cost
/// critics (detached), then one gradient step that reaches only regulator parameters.
double regulator_update(Regulator& regulator, const agents::Batch& batch, const CostCriticPair& critics,
                        const agents::Policy& policy, const RegulatorWeights& weights, Rng& rng);

}  // namespace costreg::safety
