#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "costreg/agents/sac_agent.hpp"
#include "costreg/agents/td3_agent.hpp"
#include "costreg/env/cstr.hpp"
#include "costreg/env/noise_wrapper.hpp"
#include "costreg/env/point_mass.hpp"
#include "costreg/safety/safety_layer.hpp"

namespace costreg::harness {

enum class EnvKind { point_mass, cstr };
enum class AgentKind { sac, td3 };

/// Every hyperparameter of a run. The cost budget is fixed at zero (hard-safety regime)
/// and therefore has no field.
struct TrainConfig {
  EnvKind env = EnvKind::point_mass;
  AgentKind agent = AgentKind::sac;
  bool regulator_enabled = true;
  bool scalar_mode = false;

  double beta = 10.0;
  double lambda = 0.0015;
  double epsilon = 1e-6;
  double gamma = 0.99;
  double tau = 0.005;

  double actor_lr = 3e-4;
  double critic_lr = 3e-4;
  double cost_critic_lr = 3e-4;
  double regulator_lr = 3e-4;

  double alpha = 0.2;
  bool auto_alpha = false;
  double alpha_lr = 3e-4;

  double td3_exploration_noise = 0.1;
  double td3_target_noise = 0.2;
  double td3_target_noise_clip = 0.5;
  int td3_policy_delay = 2;

  std::vector<int> hidden_sizes{256, 256};
  std::vector<int> cost_hidden_sizes{256, 256};
  Activation cost_output = Activation::identity;  // identity or softplus
  std::vector<int> regulator_hidden_sizes{256, 256};
  double cost_norm_momentum = 0.99;

  std::int64_t batch_size = 256;
  std::int64_t buffer_capacity = 1000000;
  std::int64_t warmup_steps = 1000;
  std::int64_t total_steps = 100000;
  std::int64_t updates_per_step = 1;
  std::int64_t checkpoint_every = 10000;

  double noise_sigma = 0.0;
  bool noise_observations = true;
  bool noise_actions = true;

  std::uint64_t seed = 0;
  bool trace = false;

  env::PointMassParams point_mass;
  env::CstrParams cstr;

  /// Throws ConfigurationError naming the first violated constraint.
  void validate() const;

  agents::SacConfig sac_config() const;
  agents::Td3Config td3_config() const;
  safety::SafetyConfig safety_config() const;
  env::NoiseSpec noise_spec() const;
};

std::string to_string(EnvKind kind);
std::string to_string(AgentKind kind);

/// Ordered key -> value text, keys in lower_snake_case.
std::vector<std::pair<std::string, std::string>> to_key_values(const TrainConfig& config);

/// Applies one key=value assignment. Throws ConfigurationError on unknown keys or
/// malformed values.
void apply_setting(TrainConfig& config, const std::string& key, const std::string& value);

bool is_known_key(const std::string& key);

/// Canonical text form: one `key=value` per line in a fixed order. Real values are
/// written with 17 significant digits so that parsing reproduces them exactly.
std::string render_config(const TrainConfig& config);

}  // namespace costreg::harness
