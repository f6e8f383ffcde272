#include "costreg/numeric/adam.hpp"

#include <cmath>
#include <string>

#include "costreg/errors.hpp"

namespace costreg {

AdamState AdamState::for_parameters(const ParameterSet& params) {
  AdamState state;
  state.first_moment = params.zeros_like();
  state.second_moment = params.zeros_like();
  return state;
}

void adam_step(ParameterSet& params, const ParameterSet& gradients, AdamState& state, double learning_rate) {
  if (!params.same_shape(gradients) || !params.same_shape(state.first_moment) ||
      !params.same_shape(state.second_moment)) {
    throw ConfigurationError("adam: parameter, gradient and moment shapes differ");
  }
  for (std::size_t i = 0; i < gradients.weights.size(); ++i) {
    if (!gradients.weights[i].allFinite() || !gradients.biases[i].allFinite())
      throw NumericError("adam: non-finite gradient in layer " + std::to_string(i));
  }

  state.step += 1;
  const double t = static_cast<double>(state.step);
  const double correction1 = 1.0 - std::pow(state.beta1, t);
  const double correction2 = 1.0 - std::pow(state.beta2, t);
  const double b1 = state.beta1;
  const double b2 = state.beta2;
  const double eps = state.epsilon;

  auto update = [&](auto& param, const auto& grad, auto& m, auto& v) {
    m = b1 * m + (1.0 - b1) * grad;
    v = b2 * v + (1.0 - b2) * grad.cwiseAbs2();
    param.array() -= learning_rate * (m.array() / correction1) / ((v.array() / correction2).sqrt() + eps);
  };
  for (std::size_t i = 0; i < params.weights.size(); ++i) {
    update(params.weights[i], gradients.weights[i], state.first_moment.weights[i], state.second_moment.weights[i]);
    update(params.biases[i], gradients.biases[i], state.first_moment.biases[i], state.second_moment.biases[i]);
  }
}

double ScalarAdam::update(double value, double gradient, double learning_rate) {
  if (!std::isfinite(gradient)) throw NumericError("adam: non-finite scalar gradient");
  constexpr double b1 = 0.9, b2 = 0.999, eps = 1e-8;
  step += 1;
  first_moment = b1 * first_moment + (1.0 - b1) * gradient;
  second_moment = b2 * second_moment + (1.0 - b2) * gradient * gradient;
  const double t = static_cast<double>(step);
  const double m_hat = first_moment / (1.0 - std::pow(b1, t));
  const double v_hat = second_moment / (1.0 - std::pow(b2, t));
  return value - learning_rate * m_hat / (std::sqrt(v_hat) + eps);
}

}  // namespace costreg
