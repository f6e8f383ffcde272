#pragma once

// Plain off-policy loop for the base agent alone: no cost critics, no regulator.
// Stream labels mirror the trainer so that the same seed drives the same draws.

#include <vector>

#include "costreg/harness/trainer.hpp"

namespace costreg::testing {

struct BaselineRun {
  std::vector<double> episode_returns;
  std::vector<double> episode_costs;
  Vector actor_parameters;
};

inline BaselineRun run_standalone_baseline(const harness::TrainConfig& config) {
  namespace streams = harness::streams;
  const Rng root(config.seed);
  auto environment = harness::make_environment(config, root);
  Rng init = root.split(streams::kInit);
  auto agent = harness::make_agent(config, environment->observation_size(), environment->action_size(), init);
  agents::ReplayBuffer buffer(static_cast<std::size_t>(config.buffer_capacity), environment->observation_size(),
                              environment->action_size());
  Rng env_rng = root.split(streams::kEnvironment);
  Rng buffer_rng = root.split(streams::kBuffer);
  Rng acting_rng = root.split(streams::kActing);
  Rng agent_rng = root.split(streams::kAgentUpdate);
  const agents::IdentityScaler identity;

  BaselineRun out;
  Vector obs = environment->reset(env_rng);
  double ret = 0.0, cost = 0.0;
  for (std::int64_t step = 0; step < config.total_steps; ++step) {
    const Vector action = step < config.warmup_steps
                              ? acting_rng.uniform_vector(environment->action_size(), -1.0, 1.0)
                              : agent->act(obs, acting_rng, false).action;
    const env::StepResult r = environment->step(action);
    buffer.push(agents::Transition{obs, action, r.reward, r.cost, r.next_observation, r.terminated});
    ret += r.reward;
    cost += r.cost;
    obs = r.next_observation;
    if (step >= config.warmup_steps) {
      for (std::int64_t u = 0; u < config.updates_per_step; ++u) {
        const agents::Batch batch = buffer.sample(static_cast<std::size_t>(config.batch_size), buffer_rng);
        agent->critic_update(batch, identity, agent_rng);
        agent->actor_update(batch, identity, agent_rng);
        agent->target_sync();
      }
    }
    if (r.terminated || r.truncated) {
      out.episode_returns.push_back(ret);
      out.episode_costs.push_back(cost);
      ret = cost = 0.0;
      obs = environment->reset(env_rng);
    }
  }
  out.actor_parameters = agent->actor_parameters();
  return out;
}

}  // namespace costreg::testing
