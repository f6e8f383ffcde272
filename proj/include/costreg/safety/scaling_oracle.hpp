#pragma once

#include <functional>

#include "costreg/numeric/types.hpp"
#include "costreg/safety/regulator.hpp"

namespace costreg::safety {

/// Grid minimizer of the per-(s, a) regulator problem
///   beta * cost(rho * a) - lambda * mean_i log(rho_i + epsilon)
/// over rho in {1/n, 2/n, ..., 1}^d with n = resolution. Only d <= 2 is supported.
/// `cost` maps a scaled action to a scalar (the state is fixed by the caller).
/// Test oracle; not used during training.
Vector local_scaling_oracle(const std::function<double(const Vector&)>& cost, const Vector& action,
                            const RegulatorWeights& weights, int resolution);

/// The objective minimized by local_scaling_oracle at a given rho.
double local_scaling_objective(const std::function<double(const Vector&)>& cost, const Vector& action,
                               const Vector& rho, const RegulatorWeights& weights);

}  // namespace costreg::safety
