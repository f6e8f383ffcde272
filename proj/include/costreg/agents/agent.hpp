#pragma once

#include <optional>
#include <string>
#include <vector>

#include "costreg/agents/transition.hpp"
#include "costreg/numeric/checkpoint.hpp"
#include "costreg/numeric/rng.hpp"

namespace costreg::agents {

struct SampledActions {
  Matrix actions;    // act_dim x B
  Vector log_probs;  // B, or empty for policies without a density (TD3)
};

/// Source of raw actions for a batch of observations.
class Policy {
 public:
  virtual ~Policy() = default;

  /// Behaviour sample a ~ pi(.|s), one per column.
  virtual SampledActions sample(const Matrix& observations, Rng& rng) const = 0;
  /// Next action a' used inside Bellman targets (target policy smoothing for TD3).
  virtual SampledActions bootstrap(const Matrix& next_observations, Rng& rng) const = 0;
};

/// Per-dimension scaling factors for raw actions, treated as constants by the caller.
class ActionScaler {
 public:
  virtual ~ActionScaler() = default;

  /// rho for each column of raw_actions. `bootstrap` selects target cost critics for
  /// the cost estimate fed to the regulator.
  virtual Matrix scales(const Matrix& observations, const Matrix& raw_actions, bool bootstrap) const = 0;
};

/// rho == 1: the unregulated base algorithm.
class IdentityScaler final : public ActionScaler {
 public:
  Matrix scales(const Matrix&, const Matrix& raw_actions, bool) const override {
    return Matrix::Ones(raw_actions.rows(), raw_actions.cols());
  }
};

struct ActResult {
  Vector action;
  std::optional<double> log_prob;
};

/// Off-policy actor-critic whose critics and actor are trained on scaled actions.
class Agent : public Policy {
 public:
  virtual std::string kind() const = 0;
  virtual int observation_size() const = 0;
  virtual int action_size() const = 0;

  virtual ActResult act(const Vector& observation, Rng& rng, bool deterministic) const = 0;

  /// Regress both reward critics to r + gamma (1 - done) [min twin target Q(s', rho' * a') ...].
  /// Returns the mean squared error averaged over the two critics.
  virtual double critic_update(const Batch& batch, const ActionScaler& scaler, Rng& rng) = 0;
  /// Actor step on the regulated action. Empty when the step is skipped (TD3 policy delay).
  virtual std::optional<double> actor_update(const Batch& batch, const ActionScaler& scaler, Rng& rng) = 0;
  /// Polyak-average target networks.
  virtual void target_sync() = 0;

  virtual void save(Checkpoint& ckpt) const = 0;
  virtual void load(const Checkpoint& ckpt) = 0;

  /// Actor parameters flattened, for change tracking.
  virtual Vector actor_parameters() const = 0;
};

/// Stacks observation rows over action rows: the critic input layout.
Matrix stack_rows(const Matrix& top, const Matrix& bottom);

/// Checks targets and throws NumericError naming the first non-finite entry.
void require_finite_targets(const Vector& targets, const char* what);

}  // namespace costreg::agents
