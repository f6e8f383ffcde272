#pragma once

#include "costreg/safety/cost_critics.hpp"
#include "costreg/safety/regulator.hpp"

namespace costreg::safety {

struct SafetyConfig {
  CostCriticConfig critics;
  RegulatorConfig regulator;
  RegulatorWeights weights;
};

/// One regulated action decision: c^ from the online twin cost critics, rho from the
/// regulator, and the executed action rho * a.
struct RegulatedAction {
  double cost_estimate = 0.0;
  Vector rho;
  Vector scaled;
};

/// Twin cost critics plus regulator, exposed to the agents as an ActionScaler.
class SafetyLayer final : public agents::ActionScaler {
 public:
  SafetyLayer(int observation_size, int action_size, SafetyConfig config, Rng& init_rng);

  Matrix scales(const Matrix& observations, const Matrix& raw_actions, bool bootstrap) const override;

  RegulatedAction regulate(const Vector& observation, const Vector& raw_action) const;

  double cost_critic_update(const agents::Batch& batch, const agents::Policy& policy, Rng& rng);
  double regulator_update(const agents::Batch& batch, const agents::Policy& policy, Rng& rng);
  void target_sync() { critics_.target_sync(); }

  CostCriticPair& critics() { return critics_; }
  const CostCriticPair& critics() const { return critics_; }
  Regulator& regulator() { return regulator_; }
  const Regulator& regulator() const { return regulator_; }
  const SafetyConfig& config() const { return config_; }

  void save(Checkpoint& ckpt) const;
  void load(const Checkpoint& ckpt);

  /// Cost-critic and regulator parameters flattened; used for change detection.
  Vector flat_parameters() const;

 private:
  SafetyConfig config_;
  CostCriticPair critics_;
  Regulator regulator_;
};

}  // namespace costreg::safety
