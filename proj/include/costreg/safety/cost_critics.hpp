#pragma once

#include <vector>

#include "costreg/agents/agent.hpp"
#include "costreg/agents/critic_ops.hpp"
#include "costreg/numeric/adam.hpp"
#include "costreg/numeric/dense_network.hpp"

namespace costreg::safety {

struct CostCriticConfig {
  std::vector<int> hidden_sizes{256, 256};
  double learning_rate = 3e-4;
  double gamma = 0.99;
  double tau = 0.005;
  Activation output = Activation::identity;  // softplus keeps estimates nonnegative
};

/// Differentiable cost model over scaled actions: values Q_c(s, a~) per column and the
/// gradient of their sum with respect to a~. Parameters of the model are never modified.
class CostSurface {
 public:
  virtual ~CostSurface() = default;
  virtual agents::TwinEvaluation evaluate(const Matrix& observations, const Matrix& scaled_actions) const = 0;
};

/// Twin cost critics Q_c^1, Q_c^2 over (s, a) with tanh hidden layers and Polyak targets.
/// Outputs are plain TD regressors and are not clamped at zero.
class CostCriticPair final : public CostSurface {
 public:
  CostCriticPair(int observation_size, int action_size, CostCriticConfig config, Rng& init_rng);

  /// c^ = max of the two (online or target) critic outputs, per column.
  Vector predict_cost(const Matrix& observations, const Matrix& actions, bool use_targets) const;

  /// Min over the two online critics, with gradient w.r.t. the scaled action rows.
  agents::TwinEvaluation evaluate(const Matrix& observations, const Matrix& scaled_actions) const override;

  /// y_c = c + gamma (1 - done) max_i Q_c^i_target(s', rho' * a'), with a' from the policy's
  /// bootstrap sampler and rho' from the (detached) scaler. Returns mean squared error
  /// averaged over both critics.
  double update(const agents::Batch& batch, const agents::ActionScaler& scaler, const agents::Policy& policy,
                Rng& rng);
  Vector targets(const agents::Batch& batch, const agents::ActionScaler& scaler, const agents::Policy& policy,
                 Rng& rng) const;

  void target_sync();

  void save(Checkpoint& ckpt) const;
  void load(const Checkpoint& ckpt);

  DenseNetwork& critic(int i) { return i == 0 ? q1_ : q2_; }
  const DenseNetwork& critic(int i) const { return i == 0 ? q1_ : q2_; }
  DenseNetwork& target(int i) { return i == 0 ? q1_target_ : q2_target_; }
  const CostCriticConfig& config() const { return config_; }
  int observation_size() const { return obs_dim_; }
  int action_size() const { return act_dim_; }

  /// All online and target parameters, flattened; used for change detection.
  Vector flat_parameters() const;

 private:
  int obs_dim_;
  int act_dim_;
  CostCriticConfig config_;
  DenseNetwork q1_, q2_, q1_target_, q2_target_;
  AdamState q1_opt_, q2_opt_;
};

}  // namespace costreg::safety
