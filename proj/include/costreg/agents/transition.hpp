#pragma once

#include "costreg/numeric/types.hpp"

namespace costreg::agents {

/// One stored interaction. The action is the executed, regulator-scaled action;
/// the raw policy sample is deliberately not part of the record.
struct Transition {
  Vector observation;
  Vector action;
  double reward = 0.0;
  double cost = 0.0;
  Vector next_observation;
  bool done = false;  // true termination only; truncation bootstraps
};

/// Minibatch in column layout: one sample per column.
struct Batch {
  Matrix observations;       // obs_dim x B
  Matrix actions;            // act_dim x B
  Vector rewards;            // B
  Vector costs;              // B
  Matrix next_observations;  // obs_dim x B
  Vector done;               // B, 1.0 for terminal

  Eigen::Index size() const { return rewards.size(); }
};

Batch make_batch(const std::vector<Transition>& transitions);

}  // namespace costreg::agents
