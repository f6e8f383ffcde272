#include "costreg/numeric/dense_network.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "costreg/errors.hpp"

namespace costreg {

std::string_view to_string(Activation activation) {
  switch (activation) {
    case Activation::identity: return "identity";
    case Activation::relu: return "relu";
    case Activation::tanh: return "tanh";
    case Activation::sigmoid: return "sigmoid";
    case Activation::softplus: return "softplus";
  }
  return "identity";
}

Activation activation_from_string(std::string_view name) {
  if (name == "identity") return Activation::identity;
  if (name == "relu") return Activation::relu;
  if (name == "tanh") return Activation::tanh;
  if (name == "sigmoid") return Activation::sigmoid;
  if (name == "softplus") return Activation::softplus;
  throw ConfigurationError("unknown activation '" + std::string(name) + "'");
}

namespace {

Matrix apply(Activation activation, const Matrix& z) {
  switch (activation) {
    case Activation::identity: return z;
    case Activation::relu: return z.cwiseMax(0.0);
    case Activation::tanh: return z.array().tanh().matrix();
    case Activation::sigmoid:
      return z.unaryExpr([](double x) {
        double y = x >= 0.0 ? 1.0 / (1.0 + std::exp(-x)) : std::exp(x) / (1.0 + std::exp(x));
        return std::clamp(y, kSigmoidFloor, 1.0 - kSigmoidFloor);
      });
    case Activation::softplus:
      return z.unaryExpr([](double x) { return std::max(x, 0.0) + std::log1p(std::exp(-std::abs(x))); });
  }
  return z;
}

// Derivative expressed through the pre-activation z and the activation y = act(z).
Matrix derivative(Activation activation, const Matrix& z, const Matrix& y) {
  switch (activation) {
    case Activation::identity: return Matrix::Ones(z.rows(), z.cols());
    case Activation::relu: return (z.array() > 0.0).cast<double>().matrix();
    case Activation::tanh: return (1.0 - y.array().square()).matrix();
    case Activation::sigmoid: return (y.array() * (1.0 - y.array())).matrix();
    case Activation::softplus:
      return z.unaryExpr([](double x) { return x >= 0.0 ? 1.0 / (1.0 + std::exp(-x)) : std::exp(x) / (1.0 + std::exp(x)); });
  }
  return Matrix::Ones(z.rows(), z.cols());
}

}  // namespace

ParameterSet ParameterSet::zeros_like() const {
  ParameterSet out;
  out.weights.reserve(weights.size());
  out.biases.reserve(biases.size());
  for (const auto& w : weights) out.weights.push_back(Matrix::Zero(w.rows(), w.cols()));
  for (const auto& b : biases) out.biases.push_back(Vector::Zero(b.size()));
  return out;
}

bool ParameterSet::same_shape(const ParameterSet& other) const {
  if (weights.size() != other.weights.size() || biases.size() != other.biases.size()) return false;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    if (weights[i].rows() != other.weights[i].rows() || weights[i].cols() != other.weights[i].cols())
      return false;
  }
  for (std::size_t i = 0; i < biases.size(); ++i) {
    if (biases[i].size() != other.biases[i].size()) return false;
  }
  return true;
}

bool ParameterSet::all_finite() const {
  for (const auto& w : weights)
    if (!w.allFinite()) return false;
  for (const auto& b : biases)
    if (!b.allFinite()) return false;
  return true;
}

Eigen::Index ParameterSet::size() const {
  Eigen::Index n = 0;
  for (const auto& w : weights) n += w.size();
  for (const auto& b : biases) n += b.size();
  return n;
}

ParameterSet& ParameterSet::operator+=(const ParameterSet& other) {
  if (!same_shape(other)) throw InternalError("parameter set shape mismatch in accumulation");
  for (std::size_t i = 0; i < weights.size(); ++i) weights[i] += other.weights[i];
  for (std::size_t i = 0; i < biases.size(); ++i) biases[i] += other.biases[i];
  return *this;
}

ParameterSet& ParameterSet::operator*=(double scale) {
  for (auto& w : weights) w *= scale;
  for (auto& b : biases) b *= scale;
  return *this;
}

DenseNetwork::DenseNetwork(std::vector<int> layer_sizes, Activation hidden, Activation output)
    : layer_sizes_(std::move(layer_sizes)), hidden_(hidden), output_(output) {
  if (layer_sizes_.size() < 2) throw ConfigurationError("a network needs at least an input and an output layer");
  for (int width : layer_sizes_) {
    if (width <= 0) throw ConfigurationError("layer widths must be positive");
  }
  for (int i = 0; i < layer_count(); ++i) {
    params_.weights.push_back(Matrix::Zero(layer_sizes_[i + 1], layer_sizes_[i]));
    params_.biases.push_back(Vector::Zero(layer_sizes_[i + 1]));
  }
}

void DenseNetwork::initialize(Rng& rng) {
  for (int i = 0; i < layer_count(); ++i) {
    const double bound = 1.0 / std::sqrt(static_cast<double>(layer_sizes_[i]));
    Matrix& w = params_.weights[i];
    for (Eigen::Index c = 0; c < w.cols(); ++c)
      for (Eigen::Index r = 0; r < w.rows(); ++r) w(r, c) = rng.uniform(-bound, bound);
    Vector& b = params_.biases[i];
    for (Eigen::Index r = 0; r < b.size(); ++r) b[r] = rng.uniform(-bound, bound);
  }
}

bool DenseNetwork::same_architecture(const DenseNetwork& other) const {
  return layer_sizes_ == other.layer_sizes_ && hidden_ == other.hidden_ && output_ == other.output_;
}

Activation DenseNetwork::activation_for(int layer) const {
  return layer == layer_count() - 1 ? output_ : hidden_;
}

ForwardCache DenseNetwork::forward(const Matrix& input) const {
  if (input.rows() != input_size()) {
    throw ConfigurationError("network input has " + std::to_string(input.rows()) + " rows, expected " +
                             std::to_string(input_size()));
  }
  ForwardCache cache;
  cache.pre_activations.reserve(layer_count());
  cache.activations.reserve(layer_count() + 1);
  cache.activations.push_back(input);
  for (int i = 0; i < layer_count(); ++i) {
    Matrix z = params_.weights[i] * cache.activations.back();
    z.colwise() += params_.biases[i];
    cache.activations.push_back(apply(activation_for(i), z));
    cache.pre_activations.push_back(std::move(z));
  }
  return cache;
}

Matrix DenseNetwork::predict(const Matrix& input) const {
  if (input.rows() != input_size()) {
    throw ConfigurationError("network input has " + std::to_string(input.rows()) + " rows, expected " +
                             std::to_string(input_size()));
  }
  Matrix a = input;
  for (int i = 0; i < layer_count(); ++i) {
    Matrix z = params_.weights[i] * a;
    z.colwise() += params_.biases[i];
    a = apply(activation_for(i), z);
  }
  return a;
}

Vector DenseNetwork::predict(const Vector& input) const {
  return predict(Matrix(input)).col(0);
}

Gradients DenseNetwork::backward(const ForwardCache& cache, const Matrix& output_gradient) const {
  if (static_cast<int>(cache.pre_activations.size()) != layer_count() ||
      cache.activations.size() != cache.pre_activations.size() + 1) {
    throw InternalError("forward cache depth does not match the network");
  }
  const Eigen::Index batch = cache.input().cols();
  for (int i = 0; i < layer_count(); ++i) {
    if (cache.pre_activations[i].rows() != layer_sizes_[i + 1] || cache.pre_activations[i].cols() != batch)
      throw InternalError("stale forward cache: layer " + std::to_string(i) + " shape mismatch");
  }
  if (output_gradient.rows() != output_size() || output_gradient.cols() != batch) {
    throw InternalError("output gradient shape does not match the cached forward pass");
  }

  Gradients grads;
  grads.parameters = params_.zeros_like();
  Matrix upstream = output_gradient;
  for (int i = layer_count() - 1; i >= 0; --i) {
    Matrix delta = upstream.cwiseProduct(
        derivative(activation_for(i), cache.pre_activations[i], cache.activations[i + 1]));
    grads.parameters.weights[i].noalias() = delta * cache.activations[i].transpose();
    grads.parameters.biases[i] = delta.rowwise().sum();
    upstream.noalias() = params_.weights[i].transpose() * delta;
  }
  grads.input = std::move(upstream);
  return grads;
}

Vector flatten(const ParameterSet& params) {
  Vector flat(params.size());
  Eigen::Index offset = 0;
  for (std::size_t i = 0; i < params.weights.size(); ++i) {
    const auto& w = params.weights[i];
    flat.segment(offset, w.size()) = w.reshaped();
    offset += w.size();
    flat.segment(offset, params.biases[i].size()) = params.biases[i];
    offset += params.biases[i].size();
  }
  return flat;
}

void unflatten(const Vector& flat, ParameterSet& params) {
  if (flat.size() != params.size()) throw InternalError("unflatten: size mismatch");
  Eigen::Index offset = 0;
  for (std::size_t i = 0; i < params.weights.size(); ++i) {
    auto& w = params.weights[i];
    w.reshaped() = flat.segment(offset, w.size());
    offset += w.size();
    params.biases[i] = flat.segment(offset, params.biases[i].size());
    offset += params.biases[i].size();
  }
}

void polyak_update(DenseNetwork& target, const DenseNetwork& online, double tau) {
  if (!target.same_architecture(online)) throw ConfigurationError("polyak update between different architectures");
  if (!(tau >= 0.0 && tau <= 1.0)) throw ConfigurationError("polyak tau must lie in [0, 1]");
  auto& t = target.parameters();
  const auto& o = online.parameters();
  for (std::size_t i = 0; i < t.weights.size(); ++i) {
    t.weights[i] = tau * o.weights[i] + (1.0 - tau) * t.weights[i];
    t.biases[i] = tau * o.biases[i] + (1.0 - tau) * t.biases[i];
  }
}

}  // namespace costreg
