#include "costreg/safety/scaling_oracle.hpp"

#include <cmath>
#include <limits>

#include "costreg/errors.hpp"

namespace costreg::safety {

double local_scaling_objective(const std::function<double(const Vector&)>& cost, const Vector& action,
                               const Vector& rho, const RegulatorWeights& w) {
  const double barrier = (rho.array() + w.epsilon).log().mean();
  return w.beta * cost(rho.cwiseProduct(action)) - w.lambda * barrier;
}

Vector local_scaling_oracle(const std::function<double(const Vector&)>& cost, const Vector& action,
                            const RegulatorWeights& weights, int resolution) {
  const auto d = action.size();
  if (d < 1 || d > 2) throw ConfigurationError("scaling oracle supports 1 or 2 action dimensions");
  if (resolution < 1) throw ConfigurationError("scaling oracle resolution must be positive");
  const double step = 1.0 / resolution;

  Vector best = Vector::Ones(d);
  double best_value = std::numeric_limits<double>::infinity();
  Vector rho(d);
  const int outer = d == 2 ? resolution : 1;
  for (int i = 1; i <= resolution; ++i) {
    for (int k = 1; k <= outer; ++k) {
      rho[0] = i * step;
      if (d == 2) rho[1] = k * step;
      const double value = local_scaling_objective(cost, action, rho, weights);
      if (value < best_value) {
        best_value = value;
        best = rho;
      }
    }
  }
  return best;
}

}  // namespace costreg::safety
