#include "costreg/agents/sac_agent.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "costreg/agents/critic_ops.hpp"
#include "costreg/errors.hpp"

namespace costreg::agents {

namespace {

// Keeps squashed actions strictly inside (-1, 1) where tanh rounds to +-1.
constexpr double kActionBound = 1.0 - 1e-12;

double softplus(double x) { return x > 0.0 ? x + std::log1p(std::exp(-x)) : std::log1p(std::exp(x)); }

// log(1 - tanh(u)^2), stable for large |u|.
double log_squash_jacobian(double u) { return 2.0 * (std::numbers::ln2 - u - softplus(-2.0 * u)); }

std::vector<int> with_io(int in, const std::vector<int>& hidden, int out) {
  std::vector<int> sizes{in};
  sizes.insert(sizes.end(), hidden.begin(), hidden.end());
  sizes.push_back(out);
  return sizes;
}

struct GaussianHead {
  Matrix mean;
  Matrix log_std;
  Matrix log_std_active;  // 1 where the raw log-std was inside the clamp range
};

GaussianHead split_head(const Matrix& out, int act_dim) {
  GaussianHead head;
  head.mean = out.topRows(act_dim);
  const Matrix raw = out.bottomRows(act_dim);
  head.log_std = raw.cwiseMax(kLogStdMin).cwiseMin(kLogStdMax);
  head.log_std_active = ((raw.array() >= kLogStdMin) && (raw.array() <= kLogStdMax)).cast<double>().matrix();
  return head;
}

void require_finite(const Matrix& m, const char* what) {
  if (!m.allFinite()) throw NumericError(std::string("sac: non-finite ") + what);
}

}  // namespace

SacAgent::SacAgent(int observation_size, int action_size, SacConfig config, Rng& init_rng)
    : obs_dim_(observation_size),
      act_dim_(action_size),
      config_(std::move(config)),
      target_entropy_(config_.target_entropy.value_or(-static_cast<double>(action_size))),
      actor_(with_io(observation_size, config_.hidden_sizes, 2 * action_size), Activation::relu, Activation::identity),
      q1_(with_io(observation_size + action_size, config_.hidden_sizes, 1), Activation::relu, Activation::identity),
      q2_(q1_),
      log_alpha_(std::log(config_.alpha)) {
  if (!(config_.gamma >= 0.0 && config_.gamma < 1.0)) throw ConfigurationError("sac: gamma must lie in [0, 1)");
  if (!(config_.tau > 0.0 && config_.tau <= 1.0)) throw ConfigurationError("sac: tau must lie in (0, 1]");
  if (!(config_.alpha > 0.0)) throw ConfigurationError("sac: alpha must be positive");
  Rng actor_rng = init_rng.split("sac/actor");
  Rng q1_rng = init_rng.split("sac/critic1");
  Rng q2_rng = init_rng.split("sac/critic2");
  actor_.initialize(actor_rng);
  q1_.initialize(q1_rng);
  q2_.initialize(q2_rng);
  q1_target_ = q1_;
  q2_target_ = q2_;
  actor_opt_ = AdamState::for_parameters(actor_.parameters());
  q1_opt_ = AdamState::for_parameters(q1_.parameters());
  q2_opt_ = AdamState::for_parameters(q2_.parameters());
}

double SacAgent::alpha() const { return std::exp(log_alpha_); }

SampledActions SacAgent::sample_with_noise(const Matrix& observations, const Matrix& noise) const {
  const Matrix out = actor_.predict(observations);
  require_finite(out, "actor output");
  const GaussianHead head = split_head(out, act_dim_);
  const Matrix u = head.mean + head.log_std.array().exp().matrix().cwiseProduct(noise);
  SampledActions s;
  s.actions = u.array().tanh().max(-kActionBound).min(kActionBound).matrix();
  s.log_probs.resize(observations.cols());
  const double half_log_2pi = 0.5 * std::log(2.0 * std::numbers::pi);
  for (Eigen::Index j = 0; j < u.cols(); ++j) {
    double lp = 0.0;
    for (int i = 0; i < act_dim_; ++i) {
      const double xi = noise(i, j);
      lp += -0.5 * xi * xi - head.log_std(i, j) - half_log_2pi - log_squash_jacobian(u(i, j));
    }
    s.log_probs[j] = lp;
  }
  return s;
}

SampledActions SacAgent::sample(const Matrix& observations, Rng& rng) const {
  return sample_with_noise(observations, rng.normal_matrix(act_dim_, observations.cols()));
}

SampledActions SacAgent::bootstrap(const Matrix& next_observations, Rng& rng) const {
  return sample(next_observations, rng);
}

Matrix SacAgent::mean_action(const Matrix& observations) const {
  const Matrix out = actor_.predict(observations);
  require_finite(out, "actor output");
  return out.topRows(act_dim_).array().tanh().max(-kActionBound).min(kActionBound).matrix();
}

ActResult SacAgent::act(const Vector& observation, Rng& rng, bool deterministic) const {
  if (!observation.allFinite()) throw NumericError("sac: non-finite observation");
  if (deterministic) return ActResult{mean_action(Matrix(observation)).col(0), std::nullopt};
  const SampledActions s = sample(Matrix(observation), rng);
  return ActResult{s.actions.col(0), s.log_probs[0]};
}

CriticTargets SacAgent::critic_targets(const Batch& batch, const ActionScaler& scaler, Rng& rng) const {
  CriticTargets t;
  t.next = bootstrap(batch.next_observations, rng);
  t.next_scales = scaler.scales(batch.next_observations, t.next.actions, true);
  const Matrix scaled = t.next_scales.cwiseProduct(t.next.actions);
  const Matrix inputs = stack_rows(batch.next_observations, scaled);
  const Vector next_q = min_twin(q1_target_, q2_target_, inputs);
  const Vector soft_value = next_q - alpha() * t.next.log_probs;
  t.targets = batch.rewards.array() + config_.gamma * (1.0 - batch.done.array()) * soft_value.array();
  // A terminal transition never bootstraps, even if the soft value is not finite.
  for (Eigen::Index j = 0; j < t.targets.size(); ++j) {
    if (batch.done[j] != 0.0) t.targets[j] = batch.rewards[j];
  }
  require_finite_targets(t.targets, "sac critic update");
  return t;
}

double SacAgent::critic_update(const Batch& batch, const ActionScaler& scaler, Rng& rng) {
  if (batch.size() == 0) throw ConfigurationError("sac: empty batch");
  const CriticTargets t = critic_targets(batch, scaler, rng);
  const Matrix inputs = stack_rows(batch.observations, batch.actions);
  const double l1 = regress_critic(q1_, q1_opt_, inputs, t.targets, config_.critic_lr);
  const double l2 = regress_critic(q2_, q2_opt_, inputs, t.targets, config_.critic_lr);
  return 0.5 * (l1 + l2);
}

ActorObjective SacAgent::actor_objective(const Matrix& observations, const Matrix& noise,
                                         const ActionScaler& scaler) const {
  const Eigen::Index n = observations.cols();
  const double inv_n = 1.0 / static_cast<double>(n);
  const double a = alpha();

  const ForwardCache cache = actor_.forward(observations);
  require_finite(cache.output(), "actor output");
  const GaussianHead head = split_head(cache.output(), act_dim_);
  const Matrix std_dev = head.log_std.array().exp().matrix();
  const Matrix u = head.mean + std_dev.cwiseProduct(noise);
  const Matrix actions = u.array().tanh().max(-kActionBound).min(kActionBound).matrix();

  // Scaling factors are constants here; only the actor is differentiated.
  const Matrix rho = scaler.scales(observations, actions, false);
  const Matrix scaled = rho.cwiseProduct(actions);
  const TwinEvaluation q = min_twin_with_input_gradient(q1_, q2_, stack_rows(observations, scaled));
  const Matrix dq_dscaled = q.input_gradient.bottomRows(act_dim_);

  ActorObjective obj;
  obj.actions = actions;
  obj.log_probs.resize(n);
  const double half_log_2pi = 0.5 * std::log(2.0 * std::numbers::pi);
  double total = 0.0;
  Matrix d_mean(act_dim_, n);
  Matrix d_log_std(act_dim_, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    double lp = 0.0;
    for (int i = 0; i < act_dim_; ++i) {
      const double xi = noise(i, j);
      lp += -0.5 * xi * xi - head.log_std(i, j) - half_log_2pi - log_squash_jacobian(u(i, j));
      const double t = actions(i, j);
      // d/du of [alpha log pi - Q(rho * tanh(u))]; d log pi / du = 2 tanh(u).
      const double d_u = inv_n * (a * 2.0 * t - dq_dscaled(i, j) * rho(i, j) * (1.0 - t * t));
      d_mean(i, j) = d_u;
      // log pi also depends on log-std directly through -log_std.
      d_log_std(i, j) = head.log_std_active(i, j) * (d_u * std_dev(i, j) * xi - inv_n * a);
    }
    obj.log_probs[j] = lp;
    total += a * lp - q.values[j];
  }
  obj.loss = total * inv_n;
  if (!std::isfinite(obj.loss)) throw NumericError("sac: non-finite actor loss");

  Matrix out_grad(2 * act_dim_, n);
  out_grad.topRows(act_dim_) = d_mean;
  out_grad.bottomRows(act_dim_) = d_log_std;
  obj.gradient = actor_.backward(cache, out_grad).parameters;
  return obj;
}

std::optional<double> SacAgent::actor_update(const Batch& batch, const ActionScaler& scaler, Rng& rng) {
  if (batch.size() == 0) throw ConfigurationError("sac: empty batch");
  const Matrix noise = rng.normal_matrix(act_dim_, batch.size());
  const ActorObjective obj = actor_objective(batch.observations, noise, scaler);
  adam_step(actor_.parameters(), obj.gradient, actor_opt_, config_.actor_lr);
  if (config_.auto_alpha) {
    // d/d(log alpha) of -log_alpha * mean(log pi + target entropy)
    const double grad = -(obj.log_probs.array() + target_entropy_).mean();
    log_alpha_ = alpha_opt_.update(log_alpha_, grad, config_.alpha_lr);
  }
  return obj.loss;
}

void SacAgent::target_sync() {
  polyak_update(q1_target_, q1_, config_.tau);
  polyak_update(q2_target_, q2_, config_.tau);
}

void SacAgent::save(Checkpoint& ckpt) const {
  ckpt.put("sac/actor", actor_);
  ckpt.put("sac/critic1", q1_);
  ckpt.put("sac/critic2", q2_);
  ckpt.put("sac/critic1_target", q1_target_);
  ckpt.put("sac/critic2_target", q2_target_);
  ckpt.put("sac/actor_adam", actor_opt_);
  ckpt.put("sac/critic1_adam", q1_opt_);
  ckpt.put("sac/critic2_adam", q2_opt_);
  ckpt.put("sac/alpha_state", std::vector<double>{log_alpha_, alpha_opt_.first_moment, alpha_opt_.second_moment,
                                                  static_cast<double>(alpha_opt_.step)});
}

void SacAgent::load(const Checkpoint& ckpt) {
  auto take = [&](const char* name, DenseNetwork& net) {
    const DenseNetwork& stored = ckpt.network(name);
    if (!stored.same_architecture(net))
      throw ConfigurationError(std::string("checkpoint network '") + name + "' does not match the agent");
    net = stored;
  };
  take("sac/actor", actor_);
  take("sac/critic1", q1_);
  take("sac/critic2", q2_);
  take("sac/critic1_target", q1_target_);
  take("sac/critic2_target", q2_target_);
  actor_opt_ = ckpt.adam("sac/actor_adam");
  q1_opt_ = ckpt.adam("sac/critic1_adam");
  q2_opt_ = ckpt.adam("sac/critic2_adam");
  const auto& alpha_state = ckpt.values("sac/alpha_state");
  if (alpha_state.size() != 4) throw ArtifactError("checkpoint: malformed sac/alpha_state");
  log_alpha_ = alpha_state[0];
  alpha_opt_.first_moment = alpha_state[1];
  alpha_opt_.second_moment = alpha_state[2];
  alpha_opt_.step = static_cast<std::uint64_t>(alpha_state[3]);
}

}  // namespace costreg::agents
