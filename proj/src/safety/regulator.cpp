#include "costreg/safety/regulator.hpp"

#include <cmath>

#include "costreg/errors.hpp"

namespace costreg::safety {

Regulator::Regulator(int observation_size, int action_size, RegulatorConfig config, Rng& init_rng)
    : obs_dim_(observation_size), act_dim_(action_size), config_(std::move(config)) {
  std::vector<int> sizes{observation_size + action_size + 1};
  sizes.insert(sizes.end(), config_.hidden_sizes.begin(), config_.hidden_sizes.end());
  sizes.push_back(config_.scalar_mode ? 1 : action_size);
  net_ = DenseNetwork(sizes, Activation::relu, Activation::sigmoid);
  Rng rng = init_rng.split("regulator");
  net_.initialize(rng);
  opt_ = AdamState::for_parameters(net_.parameters());
}

Matrix Regulator::inputs(const Matrix& observations, const Matrix& raw_actions, const Vector& cost_estimates) const {
  if (observations.rows() != obs_dim_ || raw_actions.rows() != act_dim_ ||
      observations.cols() != raw_actions.cols() || cost_estimates.size() != raw_actions.cols()) {
    throw ConfigurationError("regulator: input dimensions do not match");
  }
  if (!cost_estimates.allFinite()) throw NumericError("regulator: non-finite cost estimate");
  Matrix x(obs_dim_ + act_dim_ + 1, observations.cols());
  x.topRows(obs_dim_) = observations;
  x.middleRows(obs_dim_, act_dim_) = raw_actions;
  x.bottomRows(1) = (cost_estimates / (cost_scale_ + 1.0)).transpose();
  return x;
}

Matrix Regulator::broadcast(const Matrix& out) const {
  if (!config_.scalar_mode) return out;
  return out.row(0).replicate(act_dim_, 1);
}

Scaling Regulator::scale(const Matrix& observations, const Matrix& raw_actions, const Vector& cost_estimates) const {
  Scaling s;
  s.rho = broadcast(net_.predict(inputs(observations, raw_actions, cost_estimates)));
  if (!s.rho.allFinite()) throw NumericError("regulator: non-finite scaling output");
  s.scaled = s.rho.cwiseProduct(raw_actions);
  return s;
}

RegulatorObjective Regulator::objective(const Matrix& observations, const Matrix& raw_actions,
                                        const Vector& cost_estimates, const CostSurface& surface,
                                        const RegulatorWeights& w) const {
  if (!(w.beta > 0.0 && w.lambda > 0.0 && w.epsilon > 0.0))
    throw ConfigurationError("regulator: beta, lambda and epsilon must be positive");
  const Eigen::Index n = observations.cols();
  const double inv_n = 1.0 / static_cast<double>(n);
  const double inv_d = 1.0 / static_cast<double>(act_dim_);

  const ForwardCache cache = net_.forward(inputs(observations, raw_actions, cost_estimates));
  const Matrix rho = broadcast(cache.output());
  const Matrix scaled = rho.cwiseProduct(raw_actions);
  const agents::TwinEvaluation cost = surface.evaluate(observations, scaled);

  const Matrix log_term = (rho.array() + w.epsilon).log().matrix();
  RegulatorObjective obj;
  obj.loss = inv_n * (w.beta * cost.values.sum() - w.lambda * inv_d * log_term.sum());
  if (!std::isfinite(obj.loss)) throw NumericError("regulator: non-finite loss");

  // d loss / d rho = (beta a dQ/da~ - lambda / (d (rho + eps))) / n
  Matrix d_rho = inv_n * (w.beta * raw_actions.cwiseProduct(cost.input_gradient).array() -
                          w.lambda * inv_d / (rho.array() + w.epsilon))
                             .matrix();
  Matrix d_out = config_.scalar_mode ? Matrix(d_rho.colwise().sum()) : d_rho;
  obj.gradient = net_.backward(cache, d_out).parameters;
  obj.rho = rho;
  return obj;
}

double Regulator::step(const Matrix& observations, const Matrix& raw_actions, const Vector& cost_estimates,
                       const CostSurface& surface, const RegulatorWeights& weights) {
  const RegulatorObjective obj = objective(observations, raw_actions, cost_estimates, surface, weights);
  adam_step(net_.parameters(), obj.gradient, opt_, config_.learning_rate);
  const double m = config_.cost_norm_momentum;
  cost_scale_ = m * cost_scale_ + (1.0 - m) * cost_estimates.cwiseAbs().mean();
  return obj.loss;
}

void Regulator::save(Checkpoint& ckpt) const {
  ckpt.put("regulator/network", net_);
  ckpt.put("regulator/adam", opt_);
  ckpt.put("regulator/cost_scale", std::vector<double>{cost_scale_});
}

void Regulator::load(const Checkpoint& ckpt) {
  const DenseNetwork& stored = ckpt.network("regulator/network");
  if (!stored.same_architecture(net_)) throw ConfigurationError("checkpoint regulator does not match the configuration");
  net_ = stored;
  opt_ = ckpt.adam("regulator/adam");
  const auto& scale = ckpt.values("regulator/cost_scale");
  if (scale.size() != 1) throw ArtifactError("checkpoint: malformed regulator/cost_scale");
  cost_scale_ = scale[0];
}

double regulator_update(Regulator& regulator, const agents::Batch& batch, const CostCriticPair& critics,
                        const agents::Policy& policy, const RegulatorWeights& weights, Rng& rng) {
  if (batch.size() == 0) throw ConfigurationError("regulator: empty batch");
  const Matrix actions = policy.sample(batch.observations, rng).actions;
  const Vector cost_hat = critics.predict_cost(batch.observations, actions, false);
  return regulator.step(batch.observations, actions, cost_hat, critics, weights);
}

}  // namespace costreg::safety
