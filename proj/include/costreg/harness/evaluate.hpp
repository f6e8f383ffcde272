#pragma once

#include <cstdint>
#include <string>

#include "costreg/harness/train_config.hpp"
#include "costreg/numeric/checkpoint.hpp"
#include "costreg/numeric/rng.hpp"

namespace costreg::harness {

struct EvalSummary {
  std::int64_t episodes = 0;
  std::int64_t steps = 0;
  double return_mean = 0.0;
  double return_std = 0.0;
  double cost_mean = 0.0;
  double cost_std = 0.0;
  double violation_rate = 0.0;  // fraction of steps with c > 0
};

/// Rebuilds the run's config from the checkpoint.
TrainConfig config_from_checkpoint(const Checkpoint& ckpt);

/// Frozen-parameter rollouts with the regulator active exactly as during training.
/// Throws ConfigurationError when the checkpoint networks do not fit the environment.
EvalSummary evaluate(const Checkpoint& ckpt, std::int64_t episodes, bool deterministic, Rng& rng);

/// Machine-readable single line: `eval episodes=.. steps=.. return_mean=.. ...`.
std::string format_eval_line(const EvalSummary& s);
/// Inverse of format_eval_line. Throws ConfigurationError on malformed input.
EvalSummary parse_eval_line(const std::string& line);
/// Human-readable aligned table.
std::string format_eval_table(const EvalSummary& s);

}  // namespace costreg::harness
