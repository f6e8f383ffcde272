#include "costreg/harness/train_config.hpp"

#include <charconv>
#include <cstdio>
#include <functional>
#include <sstream>

#include "costreg/errors.hpp"

namespace costreg::harness {

namespace {

std::string format_real(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

double parse_real(const std::string& key, const std::string& text) {
  double v = 0.0;
  const char* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, v);
  if (ec != std::errc() || ptr != end) throw ConfigurationError("malformed real value for '" + key + "': '" + text + "'");
  return v;
}

std::int64_t parse_int(const std::string& key, const std::string& text) {
  std::int64_t v = 0;
  const char* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, v);
  if (ec != std::errc() || ptr != end)
    throw ConfigurationError("malformed integer value for '" + key + "': '" + text + "'");
  return v;
}

bool parse_bool(const std::string& key, const std::string& text) {
  if (text == "true" || text == "1") return true;
  if (text == "false" || text == "0") return false;
  throw ConfigurationError("malformed boolean value for '" + key + "': '" + text + "' (use true/false)");
}

std::vector<int> parse_sizes(const std::string& key, const std::string& text) {
  std::vector<int> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const std::int64_t v = parse_int(key, item);
    if (v <= 0 || v > 1 << 16) throw ConfigurationError("layer widths in '" + key + "' must be positive");
    out.push_back(static_cast<int>(v));
  }
  if (out.empty()) throw ConfigurationError("'" + key + "' needs at least one hidden layer width");
  return out;
}

std::string format_sizes(const std::vector<int>& sizes) {
  std::string out;
  for (std::size_t i = 0; i < sizes.size(); ++i) {
    if (i) out += ',';
    out += std::to_string(sizes[i]);
  }
  return out;
}

struct Field {
  const char* key;
  std::function<std::string(const TrainConfig&)> get;
  std::function<void(TrainConfig&, const std::string&, const std::string&)> set;
};

#define REAL_FIELD(name, member)                                                                              \
  Field {                                                                                                     \
    name, [](const TrainConfig& c) { return format_real(c.member); },                                         \
        [](TrainConfig& c, const std::string& k, const std::string& v) { c.member = parse_real(k, v); }       \
  }
#define INT_FIELD(name, member, type)                                                                         \
  Field {                                                                                                     \
    name, [](const TrainConfig& c) { return std::to_string(c.member); },                                      \
        [](TrainConfig& c, const std::string& k, const std::string& v) {                                      \
          c.member = static_cast<type>(parse_int(k, v));                                                      \
        }                                                                                                     \
  }
#define BOOL_FIELD(name, member)                                                                              \
  Field {                                                                                                     \
    name, [](const TrainConfig& c) { return std::string(c.member ? "true" : "false"); },                      \
        [](TrainConfig& c, const std::string& k, const std::string& v) { c.member = parse_bool(k, v); }       \
  }
#define SIZES_FIELD(name, member)                                                                             \
  Field {                                                                                                     \
    name, [](const TrainConfig& c) { return format_sizes(c.member); },                                        \
        [](TrainConfig& c, const std::string& k, const std::string& v) { c.member = parse_sizes(k, v); }      \
  }

const std::vector<Field>& fields() {
  static const std::vector<Field> table = {
      Field{"env", [](const TrainConfig& c) { return to_string(c.env); },
            [](TrainConfig& c, const std::string& k, const std::string& v) {
              if (v == "point_mass") c.env = EnvKind::point_mass;
              else if (v == "cstr") c.env = EnvKind::cstr;
              else throw ConfigurationError("unknown value for '" + k + "': '" + v + "' (point_mass or cstr)");
            }},
      Field{"agent", [](const TrainConfig& c) { return to_string(c.agent); },
            [](TrainConfig& c, const std::string& k, const std::string& v) {
              if (v == "sac") c.agent = AgentKind::sac;
              else if (v == "td3") c.agent = AgentKind::td3;
              else throw ConfigurationError("unknown value for '" + k + "': '" + v + "' (sac or td3)");
            }},
      BOOL_FIELD("regulator_enabled", regulator_enabled),
      BOOL_FIELD("scalar_mode", scalar_mode),
      REAL_FIELD("beta", beta),
      REAL_FIELD("lambda", lambda),
      REAL_FIELD("epsilon", epsilon),
      REAL_FIELD("gamma", gamma),
      REAL_FIELD("tau", tau),
      REAL_FIELD("actor_lr", actor_lr),
      REAL_FIELD("critic_lr", critic_lr),
      REAL_FIELD("cost_critic_lr", cost_critic_lr),
      REAL_FIELD("regulator_lr", regulator_lr),
      REAL_FIELD("alpha", alpha),
      BOOL_FIELD("auto_alpha", auto_alpha),
      REAL_FIELD("alpha_lr", alpha_lr),
      REAL_FIELD("td3_exploration_noise", td3_exploration_noise),
      REAL_FIELD("td3_target_noise", td3_target_noise),
      REAL_FIELD("td3_target_noise_clip", td3_target_noise_clip),
      INT_FIELD("td3_policy_delay", td3_policy_delay, int),
      SIZES_FIELD("hidden_sizes", hidden_sizes),
      SIZES_FIELD("cost_hidden_sizes", cost_hidden_sizes),
      Field{"cost_output", [](const TrainConfig& c) { return std::string(to_string(c.cost_output)); },
            [](TrainConfig& c, const std::string& k, const std::string& v) {
              if (v == "identity") c.cost_output = Activation::identity;
              else if (v == "softplus") c.cost_output = Activation::softplus;
              else throw ConfigurationError("unknown value for '" + k + "': '" + v + "' (identity or softplus)");
            }},
      SIZES_FIELD("regulator_hidden_sizes", regulator_hidden_sizes),
      REAL_FIELD("cost_norm_momentum", cost_norm_momentum),
      INT_FIELD("batch_size", batch_size, std::int64_t),
      INT_FIELD("buffer_capacity", buffer_capacity, std::int64_t),
      INT_FIELD("warmup_steps", warmup_steps, std::int64_t),
      INT_FIELD("total_steps", total_steps, std::int64_t),
      INT_FIELD("updates_per_step", updates_per_step, std::int64_t),
      INT_FIELD("checkpoint_every", checkpoint_every, std::int64_t),
      REAL_FIELD("noise_sigma", noise_sigma),
      BOOL_FIELD("noise_observations", noise_observations),
      BOOL_FIELD("noise_actions", noise_actions),
      Field{"seed", [](const TrainConfig& c) { return std::to_string(c.seed); },
            [](TrainConfig& c, const std::string& k, const std::string& v) {
              const std::int64_t s = parse_int(k, v);
              if (s < 0) throw ConfigurationError("seed must be nonnegative");
              c.seed = static_cast<std::uint64_t>(s);
            }},
      BOOL_FIELD("trace", trace),
      REAL_FIELD("pm_dt", point_mass.dt),
      REAL_FIELD("pm_gain", point_mass.gain),
      REAL_FIELD("pm_friction", point_mass.friction),
      REAL_FIELD("pm_v_max", point_mass.v_max),
      INT_FIELD("pm_horizon", point_mass.horizon, int),
      REAL_FIELD("pm_reset_jitter", point_mass.reset_jitter),
      REAL_FIELD("pm_position_scale", point_mass.position_scale),
      REAL_FIELD("cstr_dt", cstr.dt),
      INT_FIELD("cstr_horizon", cstr.horizon, int),
      REAL_FIELD("cstr_temperature_limit", cstr.temperature_limit),
      REAL_FIELD("cstr_setpoint", cstr.concentration_setpoint),
      REAL_FIELD("cstr_coolant_nominal", cstr.coolant_nominal),
      REAL_FIELD("cstr_coolant_span", cstr.coolant_span),
      REAL_FIELD("cstr_heat_transfer", cstr.heat_transfer),
      REAL_FIELD("cstr_initial_concentration", cstr.initial_concentration),
      REAL_FIELD("cstr_initial_temperature", cstr.initial_temperature),
  };
  return table;
}

#undef REAL_FIELD
#undef INT_FIELD
#undef BOOL_FIELD
#undef SIZES_FIELD

}  // namespace

std::string to_string(EnvKind kind) { return kind == EnvKind::point_mass ? "point_mass" : "cstr"; }
std::string to_string(AgentKind kind) { return kind == AgentKind::sac ? "sac" : "td3"; }

void TrainConfig::validate() const {
  auto require = [](bool ok, const char* what) {
    if (!ok) throw ConfigurationError(std::string("invalid configuration: ") + what);
  };
  require(gamma >= 0.0 && gamma < 1.0, "gamma must lie in [0, 1)");
  require(tau > 0.0 && tau <= 1.0, "tau must lie in (0, 1]");
  require(beta > 0.0 && lambda > 0.0 && epsilon > 0.0, "beta, lambda and epsilon must be positive");
  require(actor_lr > 0.0 && critic_lr > 0.0 && cost_critic_lr > 0.0 && regulator_lr > 0.0 && alpha_lr > 0.0,
          "learning rates must be positive");
  require(alpha > 0.0, "alpha must be positive");
  require(batch_size > 0 && buffer_capacity > 0 && warmup_steps > 0 && total_steps > 0 && updates_per_step > 0 &&
              checkpoint_every > 0,
          "all step counts must be positive");
  require(noise_sigma >= 0.0, "noise_sigma must be nonnegative");
  require(td3_policy_delay >= 1, "td3_policy_delay must be >= 1");
  require(cost_norm_momentum >= 0.0 && cost_norm_momentum < 1.0, "cost_norm_momentum must lie in [0, 1)");
  require(point_mass.dt > 0.0 && point_mass.horizon > 0 && point_mass.v_max >= 0.0 && point_mass.reset_jitter >= 0.0,
          "point-mass parameters out of range");
  require(cstr.dt > 0.0 && cstr.horizon > 0, "cstr parameters out of range");
}

agents::SacConfig TrainConfig::sac_config() const {
  agents::SacConfig c;
  c.hidden_sizes = hidden_sizes;
  c.actor_lr = actor_lr;
  c.critic_lr = critic_lr;
  c.alpha_lr = alpha_lr;
  c.gamma = gamma;
  c.tau = tau;
  c.alpha = alpha;
  c.auto_alpha = auto_alpha;
  return c;
}

agents::Td3Config TrainConfig::td3_config() const {
  agents::Td3Config c;
  c.hidden_sizes = hidden_sizes;
  c.actor_lr = actor_lr;
  c.critic_lr = critic_lr;
  c.gamma = gamma;
  c.tau = tau;
  c.exploration_noise = td3_exploration_noise;
  c.target_noise = td3_target_noise;
  c.target_noise_clip = td3_target_noise_clip;
  c.policy_delay = td3_policy_delay;
  return c;
}

safety::SafetyConfig TrainConfig::safety_config() const {
  safety::SafetyConfig c;
  c.critics.hidden_sizes = cost_hidden_sizes;
  c.critics.learning_rate = cost_critic_lr;
  c.critics.gamma = gamma;
  c.critics.tau = tau;
  c.critics.output = cost_output;
  c.regulator.hidden_sizes = regulator_hidden_sizes;
  c.regulator.learning_rate = regulator_lr;
  c.regulator.scalar_mode = scalar_mode;
  c.regulator.cost_norm_momentum = cost_norm_momentum;
  c.weights = safety::RegulatorWeights{beta, lambda, epsilon};
  return c;
}

env::NoiseSpec TrainConfig::noise_spec() const {
  return env::NoiseSpec{noise_sigma, noise_observations, noise_actions};
}

std::vector<std::pair<std::string, std::string>> to_key_values(const TrainConfig& config) {
  std::vector<std::pair<std::string, std::string>> out;
  for (const auto& f : fields()) out.emplace_back(f.key, f.get(config));
  return out;
}

bool is_known_key(const std::string& key) {
  for (const auto& f : fields())
    if (key == f.key) return true;
  return false;
}

void apply_setting(TrainConfig& config, const std::string& key, const std::string& value) {
  for (const auto& f : fields()) {
    if (key == f.key) {
      f.set(config, key, value);
      return;
    }
  }
  throw ConfigurationError("unknown configuration key '" + key + "'");
}

std::string render_config(const TrainConfig& config) {
  std::string out;
  for (const auto& [k, v] : to_key_values(config)) out += k + "=" + v + "\n";
  return out;
}

}  // namespace costreg::harness
