#pragma once

#include "costreg/numeric/adam.hpp"
#include "costreg/numeric/dense_network.hpp"

namespace costreg::agents {

/// One Adam step regressing a scalar critic onto fixed targets by squared error.
/// Returns the pre-update mean squared error.
double regress_critic(DenseNetwork& critic, AdamState& optimizer, const Matrix& inputs, const Vector& targets,
                      double learning_rate);

/// Elementwise min over two scalar critics evaluated on the same inputs, together with
/// d(sum_j min_j)/d(input), routed through whichever critic attained the min per column.
/// Critic parameters are only read.
struct TwinEvaluation {
  Vector values;
  Matrix input_gradient;
};
TwinEvaluation min_twin_with_input_gradient(const DenseNetwork& first, const DenseNetwork& second,
                                            const Matrix& inputs);

Vector min_twin(const DenseNetwork& first, const DenseNetwork& second, const Matrix& inputs);
Vector max_twin(const DenseNetwork& first, const DenseNetwork& second, const Matrix& inputs);

}  // namespace costreg::agents
