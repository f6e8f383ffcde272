#include "costreg/safety/cost_critics.hpp"

#include "costreg/errors.hpp"

namespace costreg::safety {

using agents::stack_rows;

CostCriticPair::CostCriticPair(int observation_size, int action_size, CostCriticConfig config, Rng& init_rng)
    : obs_dim_(observation_size), act_dim_(action_size), config_(std::move(config)) {
  if (!(config_.gamma >= 0.0 && config_.gamma < 1.0)) throw ConfigurationError("cost critics: gamma must lie in [0, 1)");
  if (config_.output != Activation::identity && config_.output != Activation::softplus)
    throw ConfigurationError("cost critics: output must be identity or softplus");
  if (!(config_.tau > 0.0 && config_.tau <= 1.0)) throw ConfigurationError("cost critics: tau must lie in (0, 1]");
  std::vector<int> sizes{observation_size + action_size};
  sizes.insert(sizes.end(), config_.hidden_sizes.begin(), config_.hidden_sizes.end());
  sizes.push_back(1);
  q1_ = DenseNetwork(sizes, Activation::tanh, config_.output);
  q2_ = DenseNetwork(sizes, Activation::tanh, config_.output);
  Rng r1 = init_rng.split("cost/critic1");
  Rng r2 = init_rng.split("cost/critic2");
  q1_.initialize(r1);
  q2_.initialize(r2);
  q1_target_ = q1_;
  q2_target_ = q2_;
  q1_opt_ = AdamState::for_parameters(q1_.parameters());
  q2_opt_ = AdamState::for_parameters(q2_.parameters());
}

Vector CostCriticPair::predict_cost(const Matrix& observations, const Matrix& actions, bool use_targets) const {
  const Matrix inputs = stack_rows(observations, actions);
  Vector c = use_targets ? agents::max_twin(q1_target_, q2_target_, inputs) : agents::max_twin(q1_, q2_, inputs);
  if (!c.allFinite()) throw NumericError("cost critics: non-finite cost estimate");
  return c;
}

agents::TwinEvaluation CostCriticPair::evaluate(const Matrix& observations, const Matrix& scaled_actions) const {
  agents::TwinEvaluation e = agents::min_twin_with_input_gradient(q1_, q2_, stack_rows(observations, scaled_actions));
  e.input_gradient = e.input_gradient.bottomRows(act_dim_).eval();
  return e;
}

Vector CostCriticPair::targets(const agents::Batch& batch, const agents::ActionScaler& scaler,
                               const agents::Policy& policy, Rng& rng) const {
  const agents::SampledActions next = policy.bootstrap(batch.next_observations, rng);
  const Matrix rho = scaler.scales(batch.next_observations, next.actions, true);
  const Vector next_cost =
      agents::max_twin(q1_target_, q2_target_, stack_rows(batch.next_observations, rho.cwiseProduct(next.actions)));
  Vector y = batch.costs.array() + config_.gamma * (1.0 - batch.done.array()) * next_cost.array();
  for (Eigen::Index j = 0; j < y.size(); ++j) {
    if (batch.done[j] != 0.0) y[j] = batch.costs[j];
  }
  agents::require_finite_targets(y, "cost critic update");
  return y;
}

double CostCriticPair::update(const agents::Batch& batch, const agents::ActionScaler& scaler,
                              const agents::Policy& policy, Rng& rng) {
  if (batch.size() == 0) throw ConfigurationError("cost critics: empty batch");
  const Vector y = targets(batch, scaler, policy, rng);
  const Matrix inputs = stack_rows(batch.observations, batch.actions);
  const double l1 = agents::regress_critic(q1_, q1_opt_, inputs, y, config_.learning_rate);
  const double l2 = agents::regress_critic(q2_, q2_opt_, inputs, y, config_.learning_rate);
  return 0.5 * (l1 + l2);
}

void CostCriticPair::target_sync() {
  polyak_update(q1_target_, q1_, config_.tau);
  polyak_update(q2_target_, q2_, config_.tau);
}

void CostCriticPair::save(Checkpoint& ckpt) const {
  ckpt.put("cost/critic1", q1_);
  ckpt.put("cost/critic2", q2_);
  ckpt.put("cost/critic1_target", q1_target_);
  ckpt.put("cost/critic2_target", q2_target_);
  ckpt.put("cost/critic1_adam", q1_opt_);
  ckpt.put("cost/critic2_adam", q2_opt_);
}

void CostCriticPair::load(const Checkpoint& ckpt) {
  auto take = [&](const char* name, DenseNetwork& net) {
    const DenseNetwork& stored = ckpt.network(name);
    if (!stored.same_architecture(net))
      throw ConfigurationError(std::string("checkpoint network '") + name + "' does not match the cost critics");
    net = stored;
  };
  take("cost/critic1", q1_);
  take("cost/critic2", q2_);
  take("cost/critic1_target", q1_target_);
  take("cost/critic2_target", q2_target_);
  q1_opt_ = ckpt.adam("cost/critic1_adam");
  q2_opt_ = ckpt.adam("cost/critic2_adam");
}

Vector CostCriticPair::flat_parameters() const {
  const Vector a = flatten(q1_.parameters());
  const Vector b = flatten(q2_.parameters());
  const Vector c = flatten(q1_target_.parameters());
  const Vector d = flatten(q2_target_.parameters());
  Vector out(a.size() + b.size() + c.size() + d.size());
  out << a, b, c, d;
  return out;
}

}  // namespace costreg::safety
