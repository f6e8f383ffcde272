#pragma once

#include <optional>
#include <vector>

#include "costreg/agents/agent.hpp"
#include "costreg/numeric/adam.hpp"
#include "costreg/numeric/dense_network.hpp"

namespace costreg::agents {

struct SacConfig {
  std::vector<int> hidden_sizes{256, 256};
  double actor_lr = 3e-4;
  double critic_lr = 3e-4;
  double alpha_lr = 3e-4;
  double gamma = 0.99;
  double tau = 0.005;
  double alpha = 0.2;
  bool auto_alpha = false;
  std::optional<double> target_entropy;  // defaults to -action_size
};

inline constexpr double kLogStdMin = -20.0;
inline constexpr double kLogStdMax = 2.0;

/// Bellman targets together with the next actions that produced them.
struct CriticTargets {
  Vector targets;
  SampledActions next;
  Matrix next_scales;
};

struct ActorObjective {
  double loss = 0.0;
  ParameterSet gradient;  // w.r.t. actor parameters
  Vector log_probs;
  Matrix actions;         // raw squashed actions
};

/// Soft actor-critic with a tanh-squashed Gaussian actor and twin reward critics.
class SacAgent final : public Agent {
 public:
  SacAgent(int observation_size, int action_size, SacConfig config, Rng& init_rng);

  std::string kind() const override { return "sac"; }
  int observation_size() const override { return obs_dim_; }
  int action_size() const override { return act_dim_; }

  SampledActions sample(const Matrix& observations, Rng& rng) const override;
  SampledActions bootstrap(const Matrix& next_observations, Rng& rng) const override;
  ActResult act(const Vector& observation, Rng& rng, bool deterministic) const override;

  double critic_update(const Batch& batch, const ActionScaler& scaler, Rng& rng) override;
  std::optional<double> actor_update(const Batch& batch, const ActionScaler& scaler, Rng& rng) override;
  void target_sync() override;

  void save(Checkpoint& ckpt) const override;
  void load(const Checkpoint& ckpt) override;
  Vector actor_parameters() const override { return flatten(actor_.parameters()); }

  /// Squashed-Gaussian sample with fixed standard-normal noise (columns).
  SampledActions sample_with_noise(const Matrix& observations, const Matrix& noise) const;
  /// Deterministic action tanh(mean).
  Matrix mean_action(const Matrix& observations) const;

  CriticTargets critic_targets(const Batch& batch, const ActionScaler& scaler, Rng& rng) const;
  /// Loss mean[alpha log pi(a|s) - min_i Q_i(s, rho * a)] and its gradient for fixed noise.
  ActorObjective actor_objective(const Matrix& observations, const Matrix& noise, const ActionScaler& scaler) const;

  double alpha() const;
  const SacConfig& config() const { return config_; }

  DenseNetwork& actor() { return actor_; }
  const DenseNetwork& actor() const { return actor_; }
  DenseNetwork& critic(int i) { return i == 0 ? q1_ : q2_; }
  const DenseNetwork& critic(int i) const { return i == 0 ? q1_ : q2_; }
  DenseNetwork& target_critic(int i) { return i == 0 ? q1_target_ : q2_target_; }

 private:
  int obs_dim_;
  int act_dim_;
  SacConfig config_;
  double target_entropy_;

  DenseNetwork actor_;
  DenseNetwork q1_, q2_, q1_target_, q2_target_;
  AdamState actor_opt_, q1_opt_, q2_opt_;
  double log_alpha_;
  ScalarAdam alpha_opt_;
};

}  // namespace costreg::agents
