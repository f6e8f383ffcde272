#pragma once

#include <memory>

#include "costreg/env/environment.hpp"

namespace costreg::env {

struct NoiseSpec {
  double sigma = 0.0;
  bool apply_to_observations = true;
  bool apply_to_actions = true;
};

/// Adds i.i.d. N(0, sigma^2) noise to every observation coordinate handed to the agent
/// and to every executed action coordinate before it reaches the dynamics. Reward and
/// cost are computed by the wrapped environment from its true state.
class NoiseWrapper final : public Environment {
 public:
  NoiseWrapper(std::unique_ptr<Environment> inner, NoiseSpec spec, Rng noise_stream);

  std::string_view name() const override { return inner_->name(); }
  int observation_size() const override { return inner_->observation_size(); }
  int action_size() const override { return inner_->action_size(); }

  Vector reset(Rng& rng) override;
  StepResult step(const Vector& action) override;

  const Environment& inner() const { return *inner_; }
  const NoiseSpec& spec() const { return spec_; }

 private:
  Vector perturb(const Vector& v, bool enabled);

  std::unique_ptr<Environment> inner_;
  NoiseSpec spec_;
  Rng rng_;
};

}  // namespace costreg::env
