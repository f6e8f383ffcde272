#pragma once

#include <string_view>
#include <vector>

#include "costreg/numeric/rng.hpp"
#include "costreg/numeric/types.hpp"

namespace costreg {

enum class Activation { identity, relu, tanh, sigmoid, softplus };

std::string_view to_string(Activation activation);
Activation activation_from_string(std::string_view name);

/// Sigmoid outputs are clamped to [kSigmoidFloor, 1 - kSigmoidFloor] so that
/// they stay strictly inside (0, 1) even for saturating pre-activations.
inline constexpr double kSigmoidFloor = 1e-12;

/// Weights and biases of every layer. Also used for gradients and optimizer moments,
/// which share the parameter shapes.
struct ParameterSet {
  std::vector<Matrix> weights;  // layer i: out_i x in_i
  std::vector<Vector> biases;   // layer i: out_i

  ParameterSet zeros_like() const;
  bool same_shape(const ParameterSet& other) const;
  bool all_finite() const;
  Eigen::Index size() const;

  ParameterSet& operator+=(const ParameterSet& other);
  ParameterSet& operator*=(double scale);
};

/// Per-layer record of a batched forward pass. Columns are samples.
/// activations[0] is the input; activations[i + 1] = act(pre_activations[i]).
struct ForwardCache {
  std::vector<Matrix> pre_activations;
  std::vector<Matrix> activations;

  const Matrix& output() const { return activations.back(); }
  const Matrix& input() const { return activations.front(); }
};

struct Gradients {
  ParameterSet parameters;
  Matrix input;  // d(sum_j g_j . y_j) / d x, same shape as the batched input
};

/// Fully connected feed-forward network with one activation for hidden layers and
/// one for the output layer.
class DenseNetwork {
 public:
  DenseNetwork() = default;
  DenseNetwork(std::vector<int> layer_sizes, Activation hidden, Activation output);

  /// Uniform in [-1/sqrt(fan_in), 1/sqrt(fan_in)] for weights and biases.
  void initialize(Rng& rng);

  int input_size() const { return layer_sizes_.front(); }
  int output_size() const { return layer_sizes_.back(); }
  int layer_count() const { return static_cast<int>(layer_sizes_.size()) - 1; }
  const std::vector<int>& layer_sizes() const { return layer_sizes_; }
  Activation hidden_activation() const { return hidden_; }
  Activation output_activation() const { return output_; }

  ParameterSet& parameters() { return params_; }
  const ParameterSet& parameters() const { return params_; }

  bool same_architecture(const DenseNetwork& other) const;

  /// Batched forward pass recording everything backward() needs.
  ForwardCache forward(const Matrix& input) const;
  /// Forward pass without a cache.
  Matrix predict(const Matrix& input) const;
  Vector predict(const Vector& input) const;

  /// Gradient of sum over samples of (output_gradient . output) with respect to
  /// all parameters and the input.
  Gradients backward(const ForwardCache& cache, const Matrix& output_gradient) const;

 private:
  Activation activation_for(int layer) const;

  std::vector<int> layer_sizes_{1, 1};
  Activation hidden_ = Activation::relu;
  Activation output_ = Activation::identity;
  ParameterSet params_;
};

/// Concatenation of all parameters, layer by layer: weights (column-major) then biases.
Vector flatten(const ParameterSet& params);
/// Inverse of flatten() into an already shaped parameter set.
void unflatten(const Vector& flat, ParameterSet& params);

/// Polyak averaging: target <- tau * online + (1 - tau) * target.
void polyak_update(DenseNetwork& target, const DenseNetwork& online, double tau);

}  // namespace costreg
