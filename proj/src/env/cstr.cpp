#include "costreg/env/cstr.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "costreg/errors.hpp"

namespace costreg::env {

double coolant_temperature(const CstrParams& params, double action) {
  return params.coolant_nominal + params.coolant_span * std::clamp(action, -1.0, 1.0);
}

CstrDerivatives cstr_derivatives(const CstrParams& p, double concentration, double temperature, double coolant) {
  if (!std::isfinite(concentration) || !std::isfinite(temperature) || !std::isfinite(coolant))
    throw NumericError("cstr: non-finite state");
  const double rate = p.rate_constant * std::exp(-p.activation_temperature / temperature) * concentration;
  CstrDerivatives d;
  d.concentration = p.flow_over_volume * (p.feed_concentration - concentration) - rate;
  d.temperature = p.flow_over_volume * (p.feed_temperature - temperature) + p.heat_of_reaction * rate +
                  p.heat_transfer * (coolant - temperature);
  return d;
}

CstrDerivatives cstr_derivatives(const CstrParams& params, const CstrState& state, double action) {
  return cstr_derivatives(params, state.concentration, state.temperature, coolant_temperature(params, action));
}

Cstr::Cstr(CstrParams params) : params_(params) {
  if (params_.dt <= 0.0 || params_.horizon <= 0) throw ConfigurationError("cstr: dt and horizon must be positive");
  if (params_.initial_concentration < 0.0 || params_.initial_temperature <= 0.0)
    throw ConfigurationError("cstr: initial state must satisfy C_A >= 0 and T > 0");
}

Vector Cstr::observe() const {
  Vector obs(2);
  obs << 2.0 * state_.concentration - 1.0, (state_.temperature - 350.0) / 50.0;
  return obs;
}

Vector Cstr::reset(Rng&) {
  state_ = CstrState{params_.initial_concentration, params_.initial_temperature, 0};
  return observe();
}

StepResult Cstr::step(const Vector& action) {
  if (action.size() != 1) throw ConfigurationError("cstr expects a 1-D action");
  if (!action.allFinite()) throw NumericError("cstr: non-finite action at step " + std::to_string(state_.step_index));
  const double coolant = coolant_temperature(params_, action[0]);
  const double h = params_.dt;
  const double c = state_.concentration;
  const double t = state_.temperature;

  // Classical RK4 with the coolant held over the interval.
  const auto k1 = cstr_derivatives(params_, c, t, coolant);
  const auto k2 = cstr_derivatives(params_, c + 0.5 * h * k1.concentration, t + 0.5 * h * k1.temperature, coolant);
  const auto k3 = cstr_derivatives(params_, c + 0.5 * h * k2.concentration, t + 0.5 * h * k2.temperature, coolant);
  const auto k4 = cstr_derivatives(params_, c + h * k3.concentration, t + h * k3.temperature, coolant);
  const double next_c =
      c + h / 6.0 * (k1.concentration + 2.0 * k2.concentration + 2.0 * k3.concentration + k4.concentration);
  const double next_t = t + h / 6.0 * (k1.temperature + 2.0 * k2.temperature + 2.0 * k3.temperature + k4.temperature);
  if (!std::isfinite(next_c) || !std::isfinite(next_t) || next_t <= 0.0) {
    throw NumericError("cstr: integration produced an invalid state at step " + std::to_string(state_.step_index) +
                       " (C_A=" + std::to_string(next_c) + ", T=" + std::to_string(next_t) + ")");
  }
  state_.concentration = std::max(0.0, next_c);
  state_.temperature = next_t;
  state_.step_index += 1;

  StepResult result;
  result.next_observation = observe();
  const double error = state_.concentration - params_.concentration_setpoint;
  result.reward = -error * error;
  result.cost = std::max(0.0, state_.temperature - params_.temperature_limit);
  result.truncated = state_.step_index >= params_.horizon;
  return result;
}

}  // namespace costreg::env
