#pragma once

#include <cstdint>
#include <random>
#include <string_view>

#include "costreg/numeric/types.hpp"

namespace costreg {

/// Seedable random stream. Independent child streams are derived with split(),
/// so that each stochastic component (environment, network init, replay sampling,
/// noise injection) owns its own sequence.
class Rng {
 public:
  explicit Rng(std::uint64_t seed = 0);

  std::uint64_t seed() const { return seed_; }

  /// Child stream keyed by a stable label. Does not advance this stream.
  Rng split(std::string_view label) const;

  double uniform(double low, double high);
  double normal();
  std::uint64_t below(std::uint64_t bound);

  Vector uniform_vector(Eigen::Index n, double low, double high);
  Matrix normal_matrix(Eigen::Index rows, Eigen::Index cols);

 private:
  std::uint64_t seed_;
  std::mt19937_64 engine_;
  std::normal_distribution<double> normal_{0.0, 1.0};
};

std::uint64_t splitmix64(std::uint64_t x);

}  // namespace costreg
