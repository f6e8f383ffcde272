#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "costreg/agents/agent.hpp"
#include "costreg/agents/replay_buffer.hpp"
#include "costreg/env/environment.hpp"
#include "costreg/harness/metrics.hpp"
#include "costreg/harness/train_config.hpp"
#include "costreg/safety/safety_layer.hpp"

namespace costreg::harness {

/// Stream labels derived from the config seed. Each stochastic component owns one.
namespace streams {
inline constexpr const char* kEnvironment = "environment";
inline constexpr const char* kInit = "init";
inline constexpr const char* kBuffer = "buffer";
inline constexpr const char* kNoise = "noise";
inline constexpr const char* kActing = "acting";
inline constexpr const char* kAgentUpdate = "agent_update";
inline constexpr const char* kCostUpdate = "cost_update";
inline constexpr const char* kRegulatorUpdate = "regulator_update";
}  // namespace streams

std::unique_ptr<env::Environment> make_environment(const TrainConfig& config, const Rng& root);
std::unique_ptr<agents::Agent> make_agent(const TrainConfig& config, int observation_size, int action_size,
                                          Rng& init_rng);

/// What happened at one interaction step, before any gradient update of that step.
struct StepTrace {
  std::int64_t step = 0;
  Vector observation;
  Vector raw_action;
  double cost_estimate = 0.0;  // 0 when the regulator is disabled
  Vector rho;
  Vector executed_action;
  double reward = 0.0;
  double cost = 0.0;
};

struct TrainHooks {
  std::function<void(const StepTrace&, const safety::SafetyLayer&)> on_step;
  std::function<void(const MetricsRow&)> on_episode;
};

struct RunArtifact {
  TrainConfig config;
  std::vector<MetricsRow> metrics;
  std::vector<std::filesystem::path> checkpoints;
  std::int64_t steps_completed = 0;
  std::int64_t gradient_updates = 0;
  double total_cost = 0.0;  // every step, including an unfinished final episode
  double wall_seconds = 0.0;
  std::optional<std::string> error;  // numeric abort diagnostic

  bool ok() const { return !error.has_value(); }
};

/// Interaction loop with interleaved updates:
///   s -> a ~ pi(.|s) -> c^ = max twin Q_c(s, a) -> rho = regulator(s, a, c^) -> a~ = rho * a
///   -> execute a~ -> store (s, a~, r, c, s', done)
/// then per gradient step: reward critics, actor, cost critics, regulator, Polyak targets.
/// With the regulator disabled, rho == 1 and the cost critics and regulator are never updated.
class Trainer {
 public:
  explicit Trainer(TrainConfig config);

  /// Runs to total_steps. When out_dir is set, writes config.resolved, metrics.csv,
  /// (rho_dims.csv when d > 1), trace.csv when tracing, and checkpoints/step_{N}.
  /// Numeric errors stop the loop and are recorded in the returned artifact.
  RunArtifact run(const std::optional<std::filesystem::path>& out_dir = std::nullopt, const TrainHooks& hooks = {});

  Checkpoint make_checkpoint() const;

  const TrainConfig& config() const { return config_; }
  agents::Agent& agent() { return *agent_; }
  const agents::Agent& agent() const { return *agent_; }
  safety::SafetyLayer& safety_layer() { return *safety_; }
  const safety::SafetyLayer& safety_layer() const { return *safety_; }
  const agents::ReplayBuffer& buffer() const { return *buffer_; }

 private:
  TrainConfig config_;
  Rng root_;
  std::unique_ptr<env::Environment> env_;
  std::unique_ptr<agents::Agent> agent_;
  std::unique_ptr<safety::SafetyLayer> safety_;
  std::unique_ptr<agents::ReplayBuffer> buffer_;
};

/// Convenience: Trainer(config).run(out_dir).
RunArtifact train(const TrainConfig& config, const std::optional<std::filesystem::path>& out_dir = std::nullopt);

/// Headline numbers of a run: mean return over the last `window` episodes and the
/// cumulative cost over all steps.
struct RunSummary {
  double final_return = 0.0;
  double cumulative_cost = 0.0;
  double rc_ratio = 0.0;
  double return_over_log_cost = 0.0;
  double mean_rho = 1.0;
};
RunSummary summarize_run(const RunArtifact& artifact, std::size_t window = 10);

}  // namespace costreg::harness
