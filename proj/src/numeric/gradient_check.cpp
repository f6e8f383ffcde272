#include "costreg/numeric/gradient_check.hpp"

#include <cmath>
#include <string>

#include "costreg/errors.hpp"

namespace costreg {

Vector finite_diff_gradient(const std::function<double(const Vector&)>& f, const Vector& x, double h) {
  if (!(h > 0.0)) throw ConfigurationError("finite difference step must be positive");
  Vector grad(x.size());
  Vector probe = x;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    probe[i] = x[i] + h;
    const double plus = f(probe);
    probe[i] = x[i] - h;
    const double minus = f(probe);
    probe[i] = x[i];
    if (!std::isfinite(plus) || !std::isfinite(minus))
      throw NumericError("finite difference: non-finite evaluation at coordinate " + std::to_string(i));
    grad[i] = (plus - minus) / (2.0 * h);
  }
  return grad;
}

}  // namespace costreg
