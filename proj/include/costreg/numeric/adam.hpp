#pragma once

#include <cstdint>

#include "costreg/numeric/dense_network.hpp"

namespace costreg {

struct AdamState {
  ParameterSet first_moment;
  ParameterSet second_moment;
  std::uint64_t step = 0;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;

  static AdamState for_parameters(const ParameterSet& params);
};

/// One bias-corrected Adam update. Throws NumericError naming the offending layer
/// if a gradient is not finite; parameters are left untouched in that case.
void adam_step(ParameterSet& params, const ParameterSet& gradients, AdamState& state, double learning_rate);

/// Adam over a single scalar (used for the entropy temperature).
struct ScalarAdam {
  double first_moment = 0.0;
  double second_moment = 0.0;
  std::uint64_t step = 0;

  double update(double value, double gradient, double learning_rate);
};

}  // namespace costreg
