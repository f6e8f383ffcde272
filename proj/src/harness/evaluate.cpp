#include "costreg/harness/evaluate.hpp"

#include <cstdio>
#include <sstream>
#include <vector>

#include "costreg/errors.hpp"
#include "costreg/harness/metrics.hpp"
#include "costreg/harness/trainer.hpp"

namespace costreg::harness {

TrainConfig config_from_checkpoint(const Checkpoint& ckpt) {
  TrainConfig config;
  std::istringstream in(ckpt.text("config"));
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ArtifactError("checkpoint config line without '=': " + line);
    try {
      apply_setting(config, line.substr(0, eq), line.substr(eq + 1));
    } catch (const ConfigurationError& e) {
      throw ArtifactError(std::string("checkpoint config: ") + e.what());
    }
  }
  return config;
}

EvalSummary evaluate(const Checkpoint& ckpt, std::int64_t episodes, bool deterministic, Rng& rng) {
  EvalSummary summary;
  if (episodes <= 0) return summary;

  const TrainConfig config = config_from_checkpoint(ckpt);
  auto environment = make_environment(config, rng);
  Rng init(0);
  auto agent = make_agent(config, environment->observation_size(), environment->action_size(), init);
  safety::SafetyLayer safety_layer(environment->observation_size(), environment->action_size(),
                                   config.safety_config(), init);
  try {
    agent->load(ckpt);
    safety_layer.load(ckpt);
  } catch (const ArtifactError& e) {
    throw ConfigurationError(std::string("checkpoint does not fit the environment: ") + e.what());
  }

  Rng env_rng = rng.split("eval/environment");
  Rng act_rng = rng.split("eval/acting");
  std::vector<double> returns, costs;
  std::int64_t violations = 0;
  for (std::int64_t ep = 0; ep < episodes; ++ep) {
    Vector obs = environment->reset(env_rng);
    double ret = 0.0, cost = 0.0;
    while (true) {
      const Vector raw = agent->act(obs, act_rng, deterministic).action;
      const Vector executed = config.regulator_enabled ? safety_layer.regulate(obs, raw).scaled : raw;
      const env::StepResult r = environment->step(executed);
      ret += r.reward;
      cost += r.cost;
      if (r.cost > 0.0) ++violations;
      ++summary.steps;
      obs = r.next_observation;
      if (r.terminated || r.truncated) break;
    }
    returns.push_back(ret);
    costs.push_back(cost);
  }
  summary.episodes = episodes;
  const Summary rs = summarize(returns);
  const Summary cs = summarize(costs);
  summary.return_mean = rs.mean;
  summary.return_std = rs.stddev;
  summary.cost_mean = cs.mean;
  summary.cost_std = cs.stddev;
  summary.violation_rate = static_cast<double>(violations) / static_cast<double>(summary.steps);
  return summary;
}

std::string format_eval_line(const EvalSummary& s) {
  char buf[512];
  std::snprintf(buf, sizeof(buf),
                "eval episodes=%lld steps=%lld return_mean=%.17g return_std=%.17g cost_mean=%.17g cost_std=%.17g "
                "violation_rate=%.17g",
                static_cast<long long>(s.episodes), static_cast<long long>(s.steps), s.return_mean, s.return_std,
                s.cost_mean, s.cost_std, s.violation_rate);
  return buf;
}

EvalSummary parse_eval_line(const std::string& line) {
  std::istringstream in(line);
  std::string token;
  in >> token;
  if (token != "eval") throw ConfigurationError("not an eval line");
  EvalSummary s;
  int seen = 0;
  while (in >> token) {
    const auto eq = token.find('=');
    if (eq == std::string::npos) throw ConfigurationError("malformed eval field '" + token + "'");
    const std::string key = token.substr(0, eq);
    const std::string value = token.substr(eq + 1);
    try {
      if (key == "episodes") s.episodes = std::stoll(value);
      else if (key == "steps") s.steps = std::stoll(value);
      else if (key == "return_mean") s.return_mean = std::stod(value);
      else if (key == "return_std") s.return_std = std::stod(value);
      else if (key == "cost_mean") s.cost_mean = std::stod(value);
      else if (key == "cost_std") s.cost_std = std::stod(value);
      else if (key == "violation_rate") s.violation_rate = std::stod(value);
      else throw ConfigurationError("unknown eval field '" + key + "'");
    } catch (const std::logic_error&) {
      throw ConfigurationError("malformed eval value for '" + key + "'");
    }
    ++seen;
  }
  if (seen != 7) throw ConfigurationError("eval line is missing fields");
  return s;
}

std::string format_eval_table(const EvalSummary& s) {
  char buf[512];
  std::snprintf(buf, sizeof(buf),
                "%-16s %12lld\n%-16s %12lld\n%-16s %12.3f +- %.3f\n%-16s %12.3f +- %.3f\n%-16s %12.3f\n", "episodes",
                static_cast<long long>(s.episodes), "steps", static_cast<long long>(s.steps), "return",
                s.return_mean, s.return_std, "episode cost", s.cost_mean, s.cost_std, "violation rate",
                s.violation_rate);
  return buf;
}

}  // namespace costreg::harness
