#include "costreg/safety/safety_layer.hpp"

namespace costreg::safety {

SafetyLayer::SafetyLayer(int observation_size, int action_size, SafetyConfig config, Rng& init_rng)
    : config_(std::move(config)),
      critics_(observation_size, action_size, config_.critics, init_rng),
      regulator_(observation_size, action_size, config_.regulator, init_rng) {}

Matrix SafetyLayer::scales(const Matrix& observations, const Matrix& raw_actions, bool bootstrap) const {
  const Vector cost_hat = critics_.predict_cost(observations, raw_actions, bootstrap);
  return regulator_.scale(observations, raw_actions, cost_hat).rho;
}

RegulatedAction SafetyLayer::regulate(const Vector& observation, const Vector& raw_action) const {
  const Matrix obs = observation;
  const Matrix act = raw_action;
  const Vector cost_hat = critics_.predict_cost(obs, act, false);
  const Scaling s = regulator_.scale(obs, act, cost_hat);
  return RegulatedAction{cost_hat[0], s.rho.col(0), s.scaled.col(0)};
}

double SafetyLayer::cost_critic_update(const agents::Batch& batch, const agents::Policy& policy, Rng& rng) {
  return critics_.update(batch, *this, policy, rng);
}

double SafetyLayer::regulator_update(const agents::Batch& batch, const agents::Policy& policy, Rng& rng) {
  return safety::regulator_update(regulator_, batch, critics_, policy, config_.weights, rng);
}

void SafetyLayer::save(Checkpoint& ckpt) const {
  critics_.save(ckpt);
  regulator_.save(ckpt);
}

void SafetyLayer::load(const Checkpoint& ckpt) {
  critics_.load(ckpt);
  regulator_.load(ckpt);
}

Vector SafetyLayer::flat_parameters() const {
  const Vector c = critics_.flat_parameters();
  const Vector r = flatten(regulator_.network().parameters());
  Vector out(c.size() + r.size());
  out << c, r;
  return out;
}

}  // namespace costreg::safety
