#include "costreg/env/noise_wrapper.hpp"

#include "costreg/errors.hpp"

namespace costreg::env {

NoiseWrapper::NoiseWrapper(std::unique_ptr<Environment> inner, NoiseSpec spec, Rng noise_stream)
    : inner_(std::move(inner)), spec_(spec), rng_(noise_stream) {
  if (!inner_) throw ConfigurationError("noise wrapper needs an environment");
  if (!(spec_.sigma >= 0.0)) throw ConfigurationError("noise sigma must be nonnegative");
}

Vector NoiseWrapper::perturb(const Vector& v, bool enabled) {
  if (!enabled || spec_.sigma == 0.0) return v;
  Vector out = v;
  for (Eigen::Index i = 0; i < out.size(); ++i) out[i] += spec_.sigma * rng_.normal();
  return out;
}

Vector NoiseWrapper::reset(Rng& rng) { return perturb(inner_->reset(rng), spec_.apply_to_observations); }

StepResult NoiseWrapper::step(const Vector& action) {
  StepResult result = inner_->step(perturb(action, spec_.apply_to_actions));
  result.next_observation = perturb(result.next_observation, spec_.apply_to_observations);
  return result;
}

}  // namespace costreg::env
