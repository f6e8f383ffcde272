#pragma once

#include <string_view>

#include "costreg/numeric/rng.hpp"
#include "costreg/numeric/types.hpp"

namespace costreg::env {

struct StepResult {
  Vector next_observation;
  double reward = 0.0;
  double cost = 0.0;  // >= 0
  bool terminated = false;
  bool truncated = false;
};

/// Uniform step interface with separate reward and cost channels.
/// Instances are single-owner state machines.
class Environment {
 public:
  virtual ~Environment() = default;

  virtual std::string_view name() const = 0;
  virtual int observation_size() const = 0;
  virtual int action_size() const = 0;

  virtual Vector reset(Rng& rng) = 0;
  virtual StepResult step(const Vector& action) = 0;
};

}  // namespace costreg::env
