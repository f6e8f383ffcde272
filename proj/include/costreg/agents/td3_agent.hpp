#pragma once

#include <cstdint>
#include <vector>

#include "costreg/agents/agent.hpp"
#include "costreg/numeric/adam.hpp"
#include "costreg/numeric/dense_network.hpp"

namespace costreg::agents {

struct Td3Config {
  std::vector<int> hidden_sizes{256, 256};
  double actor_lr = 3e-4;
  double critic_lr = 3e-4;
  double gamma = 0.99;
  double tau = 0.005;
  double exploration_noise = 0.1;
  double target_noise = 0.2;
  double target_noise_clip = 0.5;
  int policy_delay = 2;
};

/// Twin delayed DDPG: deterministic tanh actor, clipped double-Q targets with target
/// policy smoothing, and delayed actor/target updates.
class Td3Agent final : public Agent {
 public:
  Td3Agent(int observation_size, int action_size, Td3Config config, Rng& init_rng);

  std::string kind() const override { return "td3"; }
  int observation_size() const override { return obs_dim_; }
  int action_size() const override { return act_dim_; }

  SampledActions sample(const Matrix& observations, Rng& rng) const override;
  SampledActions bootstrap(const Matrix& next_observations, Rng& rng) const override;
  ActResult act(const Vector& observation, Rng& rng, bool deterministic) const override;

  double critic_update(const Batch& batch, const ActionScaler& scaler, Rng& rng) override;
  /// Runs only when the number of completed critic updates is divisible by policy_delay.
  std::optional<double> actor_update(const Batch& batch, const ActionScaler& scaler, Rng& rng) override;
  /// Polyak-averages all targets on the same schedule as the actor.
  void target_sync() override;

  void save(Checkpoint& ckpt) const override;
  void load(const Checkpoint& ckpt) override;
  Vector actor_parameters() const override { return flatten(actor_.parameters()); }

  Vector critic_targets(const Batch& batch, const ActionScaler& scaler, Rng& rng) const;
  std::uint64_t critic_updates() const { return critic_updates_; }

  DenseNetwork& actor() { return actor_; }
  DenseNetwork& critic(int i) { return i == 0 ? q1_ : q2_; }
  DenseNetwork& target_critic(int i) { return i == 0 ? q1_target_ : q2_target_; }
  const Td3Config& config() const { return config_; }

 private:
  bool on_policy_step() const;

  int obs_dim_;
  int act_dim_;
  Td3Config config_;
  DenseNetwork actor_, actor_target_;
  DenseNetwork q1_, q2_, q1_target_, q2_target_;
  AdamState actor_opt_, q1_opt_, q2_opt_;
  std::uint64_t critic_updates_ = 0;
};

}  // namespace costreg::agents
