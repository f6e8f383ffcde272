#include "costreg/harness/trainer.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>

#include "costreg/agents/sac_agent.hpp"
#include "costreg/agents/td3_agent.hpp"
#include "costreg/env/cstr.hpp"
#include "costreg/env/noise_wrapper.hpp"
#include "costreg/env/point_mass.hpp"
#include "costreg/errors.hpp"

namespace costreg::harness {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

struct LossAccumulator {
  double sum = 0.0;
  std::int64_t count = 0;
  void add(double v) {
    sum += v;
    ++count;
  }
  double mean() const { return count ? sum / static_cast<double>(count) : kNaN; }
};

std::string exact(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

void write_trace_header(std::ofstream& out, int obs_dim, int act_dim) {
  out << "step";
  for (int i = 0; i < obs_dim; ++i) out << ",s_" << i;
  for (int i = 0; i < act_dim; ++i) out << ",a_" << i;
  out << ",c_hat";
  for (int i = 0; i < act_dim; ++i) out << ",rho_" << i;
  for (int i = 0; i < act_dim; ++i) out << ",exec_" << i;
  out << ",reward,cost\n";
}

void write_trace_row(std::ofstream& out, const StepTrace& t) {
  out << t.step;
  for (Eigen::Index i = 0; i < t.observation.size(); ++i) out << "," << exact(t.observation[i]);
  for (Eigen::Index i = 0; i < t.raw_action.size(); ++i) out << "," << exact(t.raw_action[i]);
  out << "," << exact(t.cost_estimate);
  for (Eigen::Index i = 0; i < t.rho.size(); ++i) out << "," << exact(t.rho[i]);
  for (Eigen::Index i = 0; i < t.executed_action.size(); ++i) out << "," << exact(t.executed_action[i]);
  out << "," << exact(t.reward) << "," << exact(t.cost) << "\n";
}

}  // namespace

std::unique_ptr<env::Environment> make_environment(const TrainConfig& config, const Rng& root) {
  std::unique_ptr<env::Environment> inner;
  if (config.env == EnvKind::point_mass) {
    inner = std::make_unique<env::PointMass>(config.point_mass);
  } else {
    inner = std::make_unique<env::Cstr>(config.cstr);
  }
  return std::make_unique<env::NoiseWrapper>(std::move(inner), config.noise_spec(), root.split(streams::kNoise));
}

std::unique_ptr<agents::Agent> make_agent(const TrainConfig& config, int observation_size, int action_size,
                                          Rng& init_rng) {
  if (config.agent == AgentKind::sac)
    return std::make_unique<agents::SacAgent>(observation_size, action_size, config.sac_config(), init_rng);
  return std::make_unique<agents::Td3Agent>(observation_size, action_size, config.td3_config(), init_rng);
}

Trainer::Trainer(TrainConfig config) : config_(std::move(config)), root_(config_.seed) {
  config_.validate();
  env_ = make_environment(config_, root_);
  Rng init = root_.split(streams::kInit);
  agent_ = make_agent(config_, env_->observation_size(), env_->action_size(), init);
  safety_ = std::make_unique<safety::SafetyLayer>(env_->observation_size(), env_->action_size(),
                                                  config_.safety_config(), init);
  buffer_ = std::make_unique<agents::ReplayBuffer>(static_cast<std::size_t>(config_.buffer_capacity),
                                                   env_->observation_size(), env_->action_size());
}

Checkpoint Trainer::make_checkpoint() const {
  Checkpoint ckpt;
  agent_->save(ckpt);
  safety_->save(ckpt);
  ckpt.put("config", render_config(config_));
  return ckpt;
}

RunArtifact Trainer::run(const std::optional<std::filesystem::path>& out_dir, const TrainHooks& hooks) {
  const auto started = std::chrono::steady_clock::now();
  RunArtifact artifact;
  artifact.config = config_;

  std::ofstream trace_out;
  if (out_dir) {
    std::filesystem::create_directories(*out_dir / "checkpoints");
    std::ofstream cfg(*out_dir / "config.resolved", std::ios::trunc);
    if (!cfg) throw ArtifactError("cannot write " + (*out_dir / "config.resolved").string());
    cfg << render_config(config_);
    if (config_.trace) {
      trace_out.open(*out_dir / "trace.csv", std::ios::trunc);
      write_trace_header(trace_out, env_->observation_size(), env_->action_size());
    }
  }
  auto save_checkpoint = [&](std::int64_t step) {
    if (!out_dir) return;
    const auto path = *out_dir / "checkpoints" / ("step_" + std::to_string(step));
    make_checkpoint().save(path);
    artifact.checkpoints.push_back(path);
  };

  Rng env_rng = root_.split(streams::kEnvironment);
  Rng buffer_rng = root_.split(streams::kBuffer);
  Rng acting_rng = root_.split(streams::kActing);
  Rng agent_rng = root_.split(streams::kAgentUpdate);
  Rng cost_rng = root_.split(streams::kCostUpdate);
  Rng regulator_rng = root_.split(streams::kRegulatorUpdate);

  const agents::IdentityScaler identity;
  const agents::ActionScaler& scaler =
      config_.regulator_enabled ? static_cast<const agents::ActionScaler&>(*safety_) : identity;
  const int act_dim = env_->action_size();

  Vector obs = env_->reset(env_rng);
  MetricsRow episode;
  episode.rho_dims = Vector::Zero(act_dim);
  std::int64_t episode_steps = 0;
  double cumulative = 0.0;
  LossAccumulator actor_loss, critic_loss, cost_loss, reg_loss;

  std::int64_t step = 0;
  try {
    for (; step < config_.total_steps; ++step) {
      StepTrace t;
      t.step = step;
      t.observation = obs;
      t.raw_action = step < config_.warmup_steps ? acting_rng.uniform_vector(act_dim, -1.0, 1.0)
                                                 : agent_->act(obs, acting_rng, false).action;
      if (config_.regulator_enabled) {
        const safety::RegulatedAction reg = safety_->regulate(obs, t.raw_action);
        t.cost_estimate = reg.cost_estimate;
        t.rho = reg.rho;
        t.executed_action = reg.scaled;
      } else {
        t.rho = Vector::Ones(act_dim);
        t.executed_action = t.raw_action;
      }

      const env::StepResult result = env_->step(t.executed_action);
      if (!std::isfinite(result.reward) || !(result.cost >= 0.0) || !std::isfinite(result.cost))
        throw NumericError("environment returned an invalid reward or cost");
      t.reward = result.reward;
      t.cost = result.cost;
      if (hooks.on_step) hooks.on_step(t, *safety_);
      if (trace_out.is_open()) write_trace_row(trace_out, t);

      buffer_->push(agents::Transition{obs, t.executed_action, result.reward, result.cost, result.next_observation,
                                       result.terminated});
      episode.ep_return += result.reward;
      episode.ep_cost += result.cost;
      episode.rho_dims += t.rho;
      artifact.total_cost += result.cost;
      ++episode_steps;
      obs = result.next_observation;

      if (step >= config_.warmup_steps) {
        for (std::int64_t u = 0; u < config_.updates_per_step; ++u) {
          const agents::Batch batch = buffer_->sample(static_cast<std::size_t>(config_.batch_size), buffer_rng);
          critic_loss.add(agent_->critic_update(batch, scaler, agent_rng));
          if (const auto l = agent_->actor_update(batch, scaler, agent_rng)) actor_loss.add(*l);
          if (config_.regulator_enabled) {
            cost_loss.add(safety_->cost_critic_update(batch, *agent_, cost_rng));
            reg_loss.add(safety_->regulator_update(batch, *agent_, regulator_rng));
            safety_->target_sync();
          }
          agent_->target_sync();
          ++artifact.gradient_updates;
        }
      }

      if (result.terminated || result.truncated) {
        cumulative += episode.ep_cost;
        episode.step = step + 1;
        episode.episode = static_cast<std::int64_t>(artifact.metrics.size());
        episode.cum_cost = cumulative;
        const RcMetrics rc = compute_rc(episode.ep_return, cumulative);
        episode.rc_ratio = rc.rc_ratio;
        episode.ret_over_logcost = rc.return_over_log_cost;
        episode.rho_dims /= static_cast<double>(episode_steps);
        episode.mean_rho = episode.rho_dims.mean();
        episode.actor_loss = actor_loss.mean();
        episode.rcritic_loss = critic_loss.mean();
        episode.ccritic_loss = cost_loss.mean();
        episode.reg_loss = reg_loss.mean();
        artifact.metrics.push_back(episode);
        if (hooks.on_episode) hooks.on_episode(episode);

        episode = MetricsRow{};
        episode.rho_dims = Vector::Zero(act_dim);
        episode_steps = 0;
        actor_loss = critic_loss = cost_loss = reg_loss = LossAccumulator{};
        obs = env_->reset(env_rng);
      }

      if ((step + 1) % config_.checkpoint_every == 0) save_checkpoint(step + 1);
    }
  } catch (const NumericError& e) {
    artifact.error = "numeric abort at step " + std::to_string(step) + ": " + e.what();
  }
  artifact.steps_completed = step;
  if (artifact.ok() && step % config_.checkpoint_every != 0) save_checkpoint(step);

  if (out_dir) {
    write_metrics_csv(*out_dir / "metrics.csv", artifact.metrics);
    if (act_dim > 1) write_rho_csv(*out_dir / "rho_dims.csv", artifact.metrics);
  }
  artifact.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
  return artifact;
}

RunArtifact train(const TrainConfig& config, const std::optional<std::filesystem::path>& out_dir) {
  Trainer trainer(config);
  return trainer.run(out_dir);
}

RunSummary summarize_run(const RunArtifact& artifact, std::size_t window) {
  RunSummary s;
  s.cumulative_cost = artifact.total_cost;
  const auto& rows = artifact.metrics;
  if (!rows.empty()) {
    const std::size_t n = std::min(window, rows.size());
    double ret = 0.0, rho = 0.0;
    for (std::size_t i = rows.size() - n; i < rows.size(); ++i) {
      ret += rows[i].ep_return;
      rho += rows[i].mean_rho;
    }
    s.final_return = ret / static_cast<double>(n);
    s.mean_rho = rho / static_cast<double>(n);
  }
  const RcMetrics rc = compute_rc(s.final_return, s.cumulative_cost);
  s.rc_ratio = rc.rc_ratio;
  s.return_over_log_cost = rc.return_over_log_cost;
  return s;
}

}  // namespace costreg::harness
