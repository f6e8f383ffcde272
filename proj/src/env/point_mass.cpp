#include "costreg/env/point_mass.hpp"

#include <string>

#include "costreg/errors.hpp"

namespace costreg::env {

PointMass::PointMass(PointMassParams params) : params_(params) {
  if (params_.dt <= 0.0 || params_.horizon <= 0 || params_.v_max < 0.0 || params_.reset_jitter < 0.0)
    throw ConfigurationError("point mass: dt, horizon must be positive; v_max, reset_jitter nonnegative");
}

Vector PointMass::observe() const {
  Vector obs(4);
  obs << params_.position_scale * state_.position, state_.velocity;
  return obs;
}

Vector PointMass::reset(Rng& rng) {
  state_ = PointMassState{};
  if (params_.reset_jitter > 0.0) {
    state_.velocity.x() = rng.uniform(-params_.reset_jitter, params_.reset_jitter);
    state_.velocity.y() = rng.uniform(-params_.reset_jitter, params_.reset_jitter);
  }
  return observe();
}

StepResult PointMass::step(const Vector& action) {
  if (action.size() != 2) throw ConfigurationError("point mass expects a 2-D action");
  if (!action.allFinite()) {
    throw NumericError("point mass: non-finite action at step " + std::to_string(state_.step_index));
  }
  const Eigen::Vector2d a = action.cwiseMax(-1.0).cwiseMin(1.0);
  state_.velocity = (1.0 - params_.friction) * state_.velocity + params_.gain * params_.dt * a;
  state_.position += state_.velocity * params_.dt;
  state_.step_index += 1;

  StepResult result;
  result.next_observation = observe();
  result.reward = state_.velocity.x() * params_.dt;
  result.cost = state_.velocity.norm() > params_.v_max ? 1.0 : 0.0;
  result.terminated = false;
  result.truncated = state_.step_index >= params_.horizon;
  return result;
}

}  // namespace costreg::env
