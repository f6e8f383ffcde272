#include "costreg/agents/td3_agent.hpp"

#include <algorithm>
#include <cmath>

#include "costreg/agents/critic_ops.hpp"
#include "costreg/errors.hpp"

namespace costreg::agents {

namespace {

std::vector<int> with_io(int in, const std::vector<int>& hidden, int out) {
  std::vector<int> sizes{in};
  sizes.insert(sizes.end(), hidden.begin(), hidden.end());
  sizes.push_back(out);
  return sizes;
}

Matrix clip(const Matrix& m, double bound) { return m.cwiseMax(-bound).cwiseMin(bound); }

}  // namespace

Td3Agent::Td3Agent(int observation_size, int action_size, Td3Config config, Rng& init_rng)
    : obs_dim_(observation_size),
      act_dim_(action_size),
      config_(std::move(config)),
      actor_(with_io(observation_size, config_.hidden_sizes, action_size), Activation::relu, Activation::tanh),
      q1_(with_io(observation_size + action_size, config_.hidden_sizes, 1), Activation::relu, Activation::identity),
      q2_(q1_) {
  if (!(config_.gamma >= 0.0 && config_.gamma < 1.0)) throw ConfigurationError("td3: gamma must lie in [0, 1)");
  if (!(config_.tau > 0.0 && config_.tau <= 1.0)) throw ConfigurationError("td3: tau must lie in (0, 1]");
  if (config_.policy_delay < 1) throw ConfigurationError("td3: policy_delay must be >= 1");
  Rng actor_rng = init_rng.split("td3/actor");
  Rng q1_rng = init_rng.split("td3/critic1");
  Rng q2_rng = init_rng.split("td3/critic2");
  actor_.initialize(actor_rng);
  q1_.initialize(q1_rng);
  q2_.initialize(q2_rng);
  actor_target_ = actor_;
  q1_target_ = q1_;
  q2_target_ = q2_;
  actor_opt_ = AdamState::for_parameters(actor_.parameters());
  q1_opt_ = AdamState::for_parameters(q1_.parameters());
  q2_opt_ = AdamState::for_parameters(q2_.parameters());
}

SampledActions Td3Agent::sample(const Matrix& observations, Rng& rng) const {
  Matrix a = actor_.predict(observations);
  if (!a.allFinite()) throw NumericError("td3: non-finite actor output");
  a += config_.exploration_noise * rng.normal_matrix(act_dim_, observations.cols());
  return SampledActions{clip(a, 1.0), Vector()};
}

SampledActions Td3Agent::bootstrap(const Matrix& next_observations, Rng& rng) const {
  Matrix a = actor_target_.predict(next_observations);
  if (!a.allFinite()) throw NumericError("td3: non-finite target actor output");
  const Matrix noise = clip(config_.target_noise * rng.normal_matrix(act_dim_, next_observations.cols()),
                            config_.target_noise_clip);
  return SampledActions{clip(a + noise, 1.0), Vector()};
}

ActResult Td3Agent::act(const Vector& observation, Rng& rng, bool deterministic) const {
  if (!observation.allFinite()) throw NumericError("td3: non-finite observation");
  if (deterministic) {
    const Vector a = actor_.predict(observation);
    if (!a.allFinite()) throw NumericError("td3: non-finite actor output");
    return ActResult{a, std::nullopt};
  }
  return ActResult{sample(Matrix(observation), rng).actions.col(0), std::nullopt};
}

Vector Td3Agent::critic_targets(const Batch& batch, const ActionScaler& scaler, Rng& rng) const {
  const SampledActions next = bootstrap(batch.next_observations, rng);
  const Matrix rho = scaler.scales(batch.next_observations, next.actions, true);
  const Matrix inputs = stack_rows(batch.next_observations, rho.cwiseProduct(next.actions));
  const Vector next_q = min_twin(q1_target_, q2_target_, inputs);
  Vector y = batch.rewards.array() + config_.gamma * (1.0 - batch.done.array()) * next_q.array();
  for (Eigen::Index j = 0; j < y.size(); ++j) {
    if (batch.done[j] != 0.0) y[j] = batch.rewards[j];
  }
  require_finite_targets(y, "td3 critic update");
  return y;
}

double Td3Agent::critic_update(const Batch& batch, const ActionScaler& scaler, Rng& rng) {
  if (batch.size() == 0) throw ConfigurationError("td3: empty batch");
  const Vector y = critic_targets(batch, scaler, rng);
  const Matrix inputs = stack_rows(batch.observations, batch.actions);
  const double l1 = regress_critic(q1_, q1_opt_, inputs, y, config_.critic_lr);
  const double l2 = regress_critic(q2_, q2_opt_, inputs, y, config_.critic_lr);
  critic_updates_ += 1;
  return 0.5 * (l1 + l2);
}

bool Td3Agent::on_policy_step() const {
  return critic_updates_ > 0 && critic_updates_ % static_cast<std::uint64_t>(config_.policy_delay) == 0;
}

std::optional<double> Td3Agent::actor_update(const Batch& batch, const ActionScaler& scaler, Rng&) {
  if (batch.size() == 0) throw ConfigurationError("td3: empty batch");
  if (!on_policy_step()) return std::nullopt;
  const double inv_n = 1.0 / static_cast<double>(batch.size());
  const ForwardCache cache = actor_.forward(batch.observations);
  const Matrix& actions = cache.output();
  if (!actions.allFinite()) throw NumericError("td3: non-finite actor output");
  const Matrix rho = scaler.scales(batch.observations, actions, false);
  const Matrix inputs = stack_rows(batch.observations, rho.cwiseProduct(actions));

  const ForwardCache qc = q1_.forward(inputs);
  const double loss = -qc.output().mean();
  if (!std::isfinite(loss)) throw NumericError("td3: non-finite actor loss");
  const Matrix dq_dinput = q1_.backward(qc, Matrix::Constant(1, batch.size(), -inv_n)).input;
  const Matrix d_actions = rho.cwiseProduct(dq_dinput.bottomRows(act_dim_));
  const Gradients g = actor_.backward(cache, d_actions);
  adam_step(actor_.parameters(), g.parameters, actor_opt_, config_.actor_lr);
  return loss;
}

void Td3Agent::target_sync() {
  if (!on_policy_step()) return;
  polyak_update(actor_target_, actor_, config_.tau);
  polyak_update(q1_target_, q1_, config_.tau);
  polyak_update(q2_target_, q2_, config_.tau);
}

void Td3Agent::save(Checkpoint& ckpt) const {
  ckpt.put("td3/actor", actor_);
  ckpt.put("td3/actor_target", actor_target_);
  ckpt.put("td3/critic1", q1_);
  ckpt.put("td3/critic2", q2_);
  ckpt.put("td3/critic1_target", q1_target_);
  ckpt.put("td3/critic2_target", q2_target_);
  ckpt.put("td3/actor_adam", actor_opt_);
  ckpt.put("td3/critic1_adam", q1_opt_);
  ckpt.put("td3/critic2_adam", q2_opt_);
  ckpt.put("td3/counters", std::vector<double>{static_cast<double>(critic_updates_)});
}

void Td3Agent::load(const Checkpoint& ckpt) {
  auto take = [&](const char* name, DenseNetwork& net) {
    const DenseNetwork& stored = ckpt.network(name);
    if (!stored.same_architecture(net))
      throw ConfigurationError(std::string("checkpoint network '") + name + "' does not match the agent");
    net = stored;
  };
  take("td3/actor", actor_);
  take("td3/actor_target", actor_target_);
  take("td3/critic1", q1_);
  take("td3/critic2", q2_);
  take("td3/critic1_target", q1_target_);
  take("td3/critic2_target", q2_target_);
  actor_opt_ = ckpt.adam("td3/actor_adam");
  q1_opt_ = ckpt.adam("td3/critic1_adam");
  q2_opt_ = ckpt.adam("td3/critic2_adam");
  const auto& counters = ckpt.values("td3/counters");
  if (counters.size() != 1) throw ArtifactError("checkpoint: malformed td3/counters");
  critic_updates_ = static_cast<std::uint64_t>(counters[0]);
}

}  // namespace costreg::agents
