#pragma once

#include <Eigen/Dense>

#include "costreg/env/environment.hpp"

namespace costreg::env {

struct PointMassParams {
  double dt = 0.05;
  double gain = 2.0;       // k: acceleration per unit action
  double friction = 0.05;  // mu: fractional velocity loss per step
  double v_max = 1.0;      // speed threshold; exceeding it costs 1
  int horizon = 400;
  double reset_jitter = 0.01;  // uniform half-width on each velocity coordinate
  double position_scale = 1.0;  // observed position is position_scale * p
};

struct PointMassState {
  Eigen::Vector2d position = Eigen::Vector2d::Zero();
  Eigen::Vector2d velocity = Eigen::Vector2d::Zero();
  int step_index = 0;
};

/// Planar point mass rewarded for progress along +x. A unit cost is incurred on every
/// step whose post-update speed exceeds v_max.
/// Observation: (position_scale * position, velocity). Action: 2-D force command clamped to [-1, 1]^2.
class PointMass final : public Environment {
 public:
  explicit PointMass(PointMassParams params = {});

  std::string_view name() const override { return "point_mass"; }
  int observation_size() const override { return 4; }
  int action_size() const override { return 2; }

  Vector reset(Rng& rng) override;
  StepResult step(const Vector& action) override;

  const PointMassState& state() const { return state_; }
  void set_state(const PointMassState& state) { state_ = state; }
  const PointMassParams& params() const { return params_; }

  Vector observe() const;

 private:
  PointMassParams params_;
  PointMassState state_;
};

}  // namespace costreg::env
