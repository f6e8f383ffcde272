#pragma once

#include <functional>

#include "costreg/numeric/types.hpp"

namespace costreg {

/// Central-difference estimate of the gradient of f at x:
/// (f(x + h e_i) - f(x - h e_i)) / (2h) per coordinate.
/// Throws NumericError if any evaluation of f is not finite.
Vector finite_diff_gradient(const std::function<double(const Vector&)>& f, const Vector& x, double h);

}  // namespace costreg
