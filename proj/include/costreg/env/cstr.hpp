#pragma once

#include "costreg/env/environment.hpp"

namespace costreg::env {

/// Exothermic first-order A -> B reaction in a cooled, continuously stirred tank.
/// Units: minutes, mol/L, kelvin.
struct CstrParams {
  double flow_over_volume = 1.0;   // q/V [1/min]
  double feed_concentration = 1.0; // C_Af [mol/L]
  double feed_temperature = 350.0; // T_f [K]
  double rate_constant = 7.2e10;   // k0 [1/min]
  double activation_temperature = 8750.0;  // E/R [K]
  double heat_of_reaction = 209.2;  // -dH/(rho*Cp) [K L/mol]
  double heat_transfer = 3.0;       // UA/(V*rho*Cp) [1/min]
  double temperature_limit = 400.0; // T_limit [K]
  double dt = 0.02;                 // [min]
  int horizon = 200;

  // Coolant command: T_c = coolant_nominal + coolant_span * action, action in [-1, 1].
  double coolant_nominal = 300.0;
  double coolant_span = 50.0;

  // Reset at the steady state reached under the nominal coolant temperature.
  double initial_concentration = 0.9376735844543942;
  double initial_temperature = 315.7596715330352;

  double concentration_setpoint = 0.5;
};

struct CstrState {
  double concentration = 0.0;  // C_A
  double temperature = 0.0;    // T
  int step_index = 0;
};

struct CstrDerivatives {
  double concentration = 0.0;
  double temperature = 0.0;
};

double coolant_temperature(const CstrParams& params, double action);

/// Right-hand side of the two-state reactor balance at a given coolant temperature.
CstrDerivatives cstr_derivatives(const CstrParams& params, double concentration, double temperature,
                                 double coolant);

/// Same, with the coolant taken from a normalized action in [-1, 1].
CstrDerivatives cstr_derivatives(const CstrParams& params, const CstrState& state, double action);

/// Reactor under coolant control. Reward is the negative squared concentration tracking
/// error; cost is the temperature excess max(0, T - T_limit). Violations never end the episode.
/// Observation: (2 C_A - 1, (T - 350) / 50).
class Cstr final : public Environment {
 public:
  explicit Cstr(CstrParams params = {});

  std::string_view name() const override { return "cstr"; }
  int observation_size() const override { return 2; }
  int action_size() const override { return 1; }

  Vector reset(Rng& rng) override;
  StepResult step(const Vector& action) override;

  const CstrState& state() const { return state_; }
  void set_state(const CstrState& state) { state_ = state; }
  const CstrParams& params() const { return params_; }

  Vector observe() const;

 private:
  CstrParams params_;
  CstrState state_;
};

}  // namespace costreg::env
