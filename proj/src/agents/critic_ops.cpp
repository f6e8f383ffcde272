#include "costreg/agents/critic_ops.hpp"

#include <cmath>
#include <string>

#include "costreg/agents/agent.hpp"
#include "costreg/errors.hpp"

namespace costreg::agents {

Matrix stack_rows(const Matrix& top, const Matrix& bottom) {
  if (top.cols() != bottom.cols()) throw ConfigurationError("stack_rows: column counts differ");
  Matrix out(top.rows() + bottom.rows(), top.cols());
  out.topRows(top.rows()) = top;
  out.bottomRows(bottom.rows()) = bottom;
  return out;
}

void require_finite_targets(const Vector& targets, const char* what) {
  for (Eigen::Index j = 0; j < targets.size(); ++j) {
    if (!std::isfinite(targets[j]))
      throw NumericError(std::string(what) + ": non-finite target for transition " + std::to_string(j) +
                         " of the minibatch");
  }
}

double regress_critic(DenseNetwork& critic, AdamState& optimizer, const Matrix& inputs, const Vector& targets,
                      double learning_rate) {
  const ForwardCache cache = critic.forward(inputs);
  const RowVector error = cache.output().row(0) - targets.transpose();
  const double n = static_cast<double>(targets.size());
  const double loss = error.squaredNorm() / n;
  const Gradients grads = critic.backward(cache, (2.0 / n) * error);
  adam_step(critic.parameters(), grads.parameters, optimizer, learning_rate);
  return loss;
}

TwinEvaluation min_twin_with_input_gradient(const DenseNetwork& first, const DenseNetwork& second,
                                            const Matrix& inputs) {
  const ForwardCache c1 = first.forward(inputs);
  const ForwardCache c2 = second.forward(inputs);
  const Eigen::Index n = inputs.cols();
  Matrix pick1 = Matrix::Zero(1, n);
  Matrix pick2 = Matrix::Zero(1, n);
  TwinEvaluation out;
  out.values.resize(n);
  for (Eigen::Index j = 0; j < n; ++j) {
    const double a = c1.output()(0, j);
    const double b = c2.output()(0, j);
    if (a <= b) {
      out.values[j] = a;
      pick1(0, j) = 1.0;
    } else {
      out.values[j] = b;
      pick2(0, j) = 1.0;
    }
  }
  out.input_gradient = first.backward(c1, pick1).input + second.backward(c2, pick2).input;
  return out;
}

Vector min_twin(const DenseNetwork& first, const DenseNetwork& second, const Matrix& inputs) {
  return first.predict(inputs).row(0).cwiseMin(second.predict(inputs).row(0)).transpose();
}

Vector max_twin(const DenseNetwork& first, const DenseNetwork& second, const Matrix& inputs) {
  return first.predict(inputs).row(0).cwiseMax(second.predict(inputs).row(0)).transpose();
}

}  // namespace costreg::agents
