// Acceptance suite: one PASS/FAIL line per criterion.
//
//   costreg_acceptance --config point_mass.cfg [--only 1,2,...] [--work DIR]
//
// Exit status 0 when every selected criterion passes, 1 otherwise.

#include <CLI11.hpp>

#include <chrono>
#include <cstdarg>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <set>
#include <sstream>

#include "costreg/cli/commands.hpp"
#include "costreg/cli/config_file.hpp"
#include "costreg/harness/evaluate.hpp"
#include "costreg/harness/metrics.hpp"
#include "costreg/harness/sweep.hpp"
#include "costreg/harness/trainer.hpp"
#include "costreg/safety/regulator.hpp"
#include "costreg/safety/scaling_oracle.hpp"
#include "support/baseline.hpp"
#include "support/oracles.hpp"
#include "support/surrogates.hpp"

using namespace costreg;
using harness::RunArtifact;
using harness::RunSummary;
using harness::TrainConfig;
namespace fs = std::filesystem;

namespace {

struct Verdict {
  bool pass = false;
  std::string detail;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

std::string fmt(const char* format, ...) __attribute__((format(printf, 1, 2)));
std::string fmt(const char* format, ...) {
  char buf[1024];
  va_list args;
  va_start(args, format);
  std::vsnprintf(buf, sizeof(buf), format, args);
  va_end(args);
  return buf;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

bool same_bits(double a, double b) { return std::memcmp(&a, &b, sizeof(double)) == 0; }

// Criterion 1 --------------------------------------------------------------

Verdict gradient_integrity() {
  const auto t0 = Clock::now();
  Rng rng(1);
  double worst = 0.0;
  long coordinates = 0;
  for (int k = 0; k < 1000; ++k) {
    const testing::GradientCheckResult r = testing::check_random_network(rng);
    worst = std::max(worst, r.max_relative_error);
    coordinates += r.coordinates;
  }
  const double elapsed = seconds_since(t0);
  return {worst < 1e-4 && elapsed < 30.0,
          fmt("max relative error %.3g over 1000 networks (%ld coordinates), %.1f s (limits 1e-4, 30 s)", worst,
              coordinates, elapsed)};
}

// Criterion 2 --------------------------------------------------------------

Verdict scaling_range() {
  const auto t0 = Clock::now();
  const int n = 100000;
  bool ok = true;
  double lo = 1.0, hi = 0.0;
  for (const bool scalar : {false, true}) {
    safety::RegulatorConfig cfg;
    cfg.scalar_mode = scalar;
    Rng init(scalar ? 3 : 2);
    safety::Regulator reg(4, 3, cfg, init);
    Rng rng(4);
    Matrix s(4, n), a(3, n);
    Vector c(n);
    for (int j = 0; j < n; ++j) {
      s.col(j) = rng.uniform_vector(4, -10.0, 10.0);
      a.col(j) = rng.uniform_vector(3, -1.0, 1.0);
      c[j] = std::pow(10.0, rng.uniform(-6.0, 6.0)) * (rng.below(2) ? 1.0 : -1.0);
    }
    c[0] = 1e6;
    c[1] = -1e6;
    const safety::Scaling out = reg.scale(s, a, c);
    lo = std::min(lo, out.rho.minCoeff());
    hi = std::max(hi, out.rho.maxCoeff());
    for (int j = 0; j < n; ++j)
      for (int i = 0; i < 3; ++i) {
        const double x = a(i, j), y = out.scaled(i, j);
        ok = ok && std::abs(y) <= std::abs(x) && (x == 0.0 || std::signbit(x) == std::signbit(y));
      }
  }
  ok = ok && lo > 0.0 && hi < 1.0;
  const double elapsed = seconds_since(t0);
  return {ok && elapsed < 10.0,
          fmt("2 x %d queries, |c^| up to 1e6: rho in [%.3g, 1 - %.3g], magnitude and sign %s, %.1f s (limit 10 s)", n,
              lo, 1.0 - hi, ok ? "preserved" : "VIOLATED", elapsed)};
}

// Criterion 3 --------------------------------------------------------------

Verdict oracle_agreement() {
  const auto t0 = Clock::now();
  const int resolution = 1000;
  const double cell = 1.0 / resolution;

  const testing::QuadraticSurface square(1.0);
  const auto q = [&](const Vector& x) { return square(x); };
  const Vector one = Vector::Ones(1);
  const double boundary = safety::local_scaling_oracle(q, one, {1.0, 2.0, 1e-9}, resolution)[0];
  const double interior = safety::local_scaling_oracle(q, one, {8.0, 1.0, 1e-9}, resolution)[0];
  const bool analytic = std::abs(boundary - 1.0) <= cell && std::abs(interior - 0.25) <= cell;

  Rng rng(5);
  double worst = 0.0;
  for (int k = 0; k < 20; ++k) {
    const double beta = rng.uniform(1.0, 10.0), lambda = rng.uniform(0.5, 2.0);
    const testing::QuadraticSurface surface(rng.uniform(0.5, 2.0), rng.uniform(0.0, 1.0));
    const Vector a = Vector::Constant(1, rng.uniform(0.5, 1.0));
    const Vector s = rng.uniform_vector(2, -1.0, 1.0);
    const safety::RegulatorWeights w{beta, lambda, 1e-6};
    const auto f = [&](const Vector& x) { return surface(x); };
    const double target = safety::local_scaling_oracle(f, a, w, resolution)[0];

    safety::RegulatorConfig cfg;
    cfg.hidden_sizes = {16, 16};
    cfg.learning_rate = 1e-2;
    Rng init = rng.split("regulator");
    safety::Regulator reg(2, 1, cfg, init);
    const double learned = testing::fit_regulator(reg, s, a, 0.5, surface, w, 200)[0];
    worst = std::max(worst, std::abs(learned - target));
  }
  const double elapsed = seconds_since(t0);
  return {analytic && worst < 0.02 && elapsed < 120.0,
          fmt("analytic rho* = %.3f (1.0) and %.3f (0.25); 20 random instances max |rho - rho*| = %.4f after 200 steps, "
              "%.1f s (limits 0.02, 2 min)",
              boundary, interior, worst, elapsed)};
}

// Criterion 4 --------------------------------------------------------------

Verdict cost_critic_chain() {
  const auto t0 = Clock::now();
  const testing::ChainResult r = testing::run_two_state_chain(1.0, 0.0, 0.9, 6000, 6);
  const double err = std::max(std::abs(r.q0 - r.exact0), std::abs(r.q1 - r.exact1));
  const double elapsed = seconds_since(t0);
  return {err < 1e-2 && elapsed < 60.0,
          fmt("Q_c(s0) = %.4f vs %.4f, Q_c(s1) = %.4f vs %.4f, max error %.2e, %.1f s (limits 1e-2, 1 min)", r.q0,
              r.exact0, r.q1, r.exact1, err, elapsed)};
}

// Criterion 5 --------------------------------------------------------------

Verdict baseline_reduction(const TrainConfig& base) {
  bool ok = true;
  std::string detail;
  for (const harness::AgentKind kind : {harness::AgentKind::sac, harness::AgentKind::td3}) {
    TrainConfig c = base;
    c.agent = kind;
    c.regulator_enabled = false;
    c.total_steps = 5000;
    harness::Trainer trainer(c);
    const Vector safety_before = trainer.safety_layer().flat_parameters();
    const RunArtifact run = trainer.run();
    const testing::BaselineRun ref = testing::run_standalone_baseline(c);

    bool identical = run.ok() && run.metrics.size() == ref.episode_returns.size();
    for (std::size_t i = 0; identical && i < run.metrics.size(); ++i)
      identical = same_bits(run.metrics[i].ep_return, ref.episode_returns[i]) &&
                  same_bits(run.metrics[i].ep_cost, ref.episode_costs[i]);
    identical = identical && trainer.agent().actor_parameters() == ref.actor_parameters;
    const bool frozen = trainer.safety_layer().flat_parameters() == safety_before;
    ok = ok && identical && frozen;
    detail += fmt("%s%s: %zu episodes %s, safety parameters %s", detail.empty() ? "" : "; ",
                  harness::to_string(kind).c_str(), run.metrics.size(), identical ? "bit-identical" : "DIFFER",
                  frozen ? "unchanged" : "CHANGED");
  }
  return {ok, detail};
}

// Criteria 6-9: shared desk-scale runs -----------------------------------------

class RunBank {
 public:
  RunBank(TrainConfig base, fs::path work) : base_(std::move(base)), work_(std::move(work)) {}

  const TrainConfig& base() const { return base_; }

  /// Memoized training run keyed by its rendered config.
  const RunArtifact& get(const TrainConfig& config, const std::string& name) {
    const std::string key = harness::render_config(config);
    auto it = runs_.find(key);
    if (it != runs_.end()) return it->second;
    const fs::path dir = work_ / name;
    fs::remove_all(dir);
    std::cout << "  running " << name << " ..." << std::flush;
    RunArtifact run = harness::train(config, dir);
    const RunSummary s = harness::summarize_run(run);
    std::cout << fmt(" return %.2f, cumulative cost %.0f, %.0f s%s\n", s.final_return, s.cumulative_cost,
                     run.wall_seconds, run.ok() ? "" : (" ERROR " + *run.error).c_str());
    dirs_[key] = dir;
    return runs_.emplace(key, std::move(run)).first->second;
  }

  /// Uncached run of the same config, for reproducibility checks.
  RunArtifact rerun(const TrainConfig& config, const std::string& name) {
    std::cout << "  re-running " << name << " ..." << std::flush;
    RunArtifact run = harness::train(config, work_ / (name + "_rerun"));
    std::cout << fmt(" %.0f s\n", run.wall_seconds);
    return run;
  }

  fs::path directory(const TrainConfig& config) const { return dirs_.at(harness::render_config(config)); }

  TrainConfig regulated(int seed_offset, double lambda = 0.0015) const {
    TrainConfig c = base_;
    c.regulator_enabled = true;
    c.beta = 10.0;
    c.lambda = lambda;
    c.seed = base_.seed + static_cast<std::uint64_t>(seed_offset);
    return c;
  }
  TrainConfig unregulated(int seed_offset) const {
    TrainConfig c = regulated(seed_offset);
    c.regulator_enabled = false;
    return c;
  }

 private:
  TrainConfig base_;
  fs::path work_;
  std::map<std::string, RunArtifact> runs_;
  std::map<std::string, fs::path> dirs_;
};

constexpr int kSeeds = 3;
constexpr double kRunLimitSeconds = 15.0 * 60.0;

std::string lambda_name(double lambda) { return fmt("%g", lambda); }

Verdict safety_efficacy(RunBank& bank) {
  std::vector<double> cost_reg, cost_unreg, ret_reg, ret_unreg, rc_reg, rc_unreg;
  double slowest = 0.0;
  bool ok = true;
  for (int k = 0; k < kSeeds; ++k) {
    const RunArtifact& r = bank.get(bank.regulated(k), fmt("sac_reg_lambda_0.0015_seed_%d", k));
    const RunArtifact& u = bank.get(bank.unregulated(k), fmt("sac_unreg_seed_%d", k));
    ok = ok && r.ok() && u.ok();
    const RunSummary rs = harness::summarize_run(r), us = harness::summarize_run(u);
    cost_reg.push_back(rs.cumulative_cost);
    cost_unreg.push_back(us.cumulative_cost);
    ret_reg.push_back(rs.final_return);
    ret_unreg.push_back(us.final_return);
    rc_reg.push_back(rs.rc_ratio);
    rc_unreg.push_back(us.rc_ratio);
    slowest = std::max({slowest, r.wall_seconds, u.wall_seconds});
  }
  const double mc_r = harness::median(cost_reg), mc_u = harness::median(cost_unreg);
  const double mr_r = harness::median(ret_reg), mr_u = harness::median(ret_unreg);
  const double rc_r = harness::median(rc_reg), rc_u = harness::median(rc_unreg);
  const bool cost_ok = mc_r <= 0.2 * mc_u;
  const bool return_ok = mr_r >= 0.5 * mr_u;
  const bool rc_ok = rc_r > rc_u;
  const bool time_ok = slowest < kRunLimitSeconds;
  return {ok && cost_ok && return_ok && rc_ok && time_ok,
          fmt("median cost %.0f vs %.0f (%.1f%%, limit 20%%), median return %.2f vs %.2f (%.1f%%, need 50%%), "
              "median RC %.3g vs %.3g, slowest run %.0f s (limit 900 s)",
              mc_r, mc_u, 100.0 * mc_r / std::max(mc_u, 1e-12), mr_r, mr_u, 100.0 * mr_r / std::max(mr_u, 1e-12),
              rc_r, rc_u, slowest)};
}

Verdict lambda_monotonicity(RunBank& bank) {
  const std::vector<double> lambdas{1e-5, 0.0015, 0.25};
  std::vector<double> medians;
  bool ok = true;
  for (const double lambda : lambdas) {
    std::vector<double> costs;
    for (int k = 0; k < kSeeds; ++k) {
      const RunArtifact& r =
          bank.get(bank.regulated(k, lambda), fmt("sac_reg_lambda_%s_seed_%d", lambda_name(lambda).c_str(), k));
      ok = ok && r.ok();
      costs.push_back(r.total_cost);
    }
    medians.push_back(harness::median(costs));
  }
  const bool extremes = medians.front() < medians.back();
  const bool full = medians[0] <= medians[1] && medians[1] <= medians[2];
  return {ok && extremes,
          fmt("median cumulative cost at lambda 1e-5 / 0.0015 / 0.25: %.0f / %.0f / %.0f; extremes %s, full order %s",
              medians[0], medians[1], medians[2], extremes ? "strictly increasing" : "NOT increasing",
              full ? "nondecreasing" : "not monotone in the middle")};
}

Verdict noise_robustness(RunBank& bank) {
  bool ok = true;
  std::string detail;
  const TrainConfig reference_config = bank.regulated(0);
  const RunSummary reference = harness::summarize_run(bank.get(reference_config, "sac_reg_lambda_0.0015_seed_0"));
  for (const char* sigma : {"0", "0.025", "0.05", "0.10"}) {
    const TrainConfig c = harness::apply_axis(reference_config, harness::SweepAxis::noise, sigma);
    const std::string name = std::string("sac_reg_noise_") + sigma + "_seed_0";
    const bool clean = std::string(sigma) == "0";
    RunArtifact fresh;
    if (clean) fresh = bank.rerun(c, name);
    const RunArtifact& r = clean ? fresh : bank.get(c, name);
    const std::int64_t expected_episodes = c.total_steps / c.point_mass.horizon;
    bool finite = true;
    for (const auto& row : r.metrics) finite = finite && std::isfinite(row.cum_cost);
    const std::size_t expected_ckpts = static_cast<std::size_t>((c.total_steps + c.checkpoint_every - 1) / c.checkpoint_every);
    bool ckpts = r.checkpoints.size() == expected_ckpts;
    for (const auto& p : r.checkpoints) ckpts = ckpts && fs::exists(p);
    const bool full = r.ok() && static_cast<std::int64_t>(r.metrics.size()) == expected_episodes &&
                      r.steps_completed == c.total_steps;
    const RunSummary s = harness::summarize_run(r);
    bool matches = true;
    if (clean)
      matches = same_bits(s.final_return, reference.final_return) &&
                same_bits(s.cumulative_cost, reference.cumulative_cost);
    ok = ok && finite && ckpts && full && matches;
    detail += fmt("%ssigma %s: %s, %zu rows, cost %.0f%s", detail.empty() ? "" : "; ", sigma,
                  full ? "complete" : "INCOMPLETE", r.metrics.size(), s.cumulative_cost,
                  std::string(sigma) == "0" ? (matches ? ", equals regulated seed 0" : ", DIFFERS from seed 0") : "");
    if (!finite || !ckpts) detail += " (non-finite cost or missing checkpoint)";
  }
  return {ok, detail};
}

Verdict scaling_modes(RunBank& bank) {
  const TrainConfig elementwise = bank.regulated(0);
  const RunArtifact& e = bank.get(elementwise, "sac_reg_lambda_0.0015_seed_0");
  const harness::CsvTable rho = harness::read_csv(bank.directory(elementwise) / "rho_dims.csv");
  const bool logged = rho.column("rho_0") >= 0 && rho.column("rho_1") >= 0 && rho.rows.size() == e.metrics.size();
  double spread = 0.0;
  for (const auto& row : rho.rows) spread = std::max(spread, std::abs(row[rho.column("rho_0")] - row[rho.column("rho_1")]));

  TrainConfig scalar = elementwise;
  scalar.scalar_mode = true;
  const fs::path dir = fs::temp_directory_path() / "costreg_acceptance_scalar";
  fs::remove_all(dir);
  std::int64_t steps = 0, unequal = 0;
  harness::TrainHooks hooks;
  hooks.on_step = [&](const harness::StepTrace& t, const safety::SafetyLayer&) {
    ++steps;
    for (Eigen::Index i = 1; i < t.rho.size(); ++i)
      if (t.rho[i] != t.rho[0]) ++unequal;
  };
  std::cout << "  running sac_reg_scalar_seed_0 ..." << std::flush;
  harness::Trainer trainer(scalar);
  const RunArtifact s = trainer.run(dir, hooks);
  std::cout << fmt(" %.0f s\n", s.wall_seconds);
  fs::remove_all(dir);
  const RunSummary es = harness::summarize_run(e), ss = harness::summarize_run(s);
  const bool ok = e.ok() && s.ok() && logged && steps == scalar.total_steps && unequal == 0;
  return {ok, fmt("elementwise: %zu per-dimension rows, max |rho_0 - rho_1| %.3f, return %.2f, cost %.0f; "
                  "scalar: %lld steps, %lld unequal components, return %.2f, cost %.0f",
                  rho.rows.size(), spread, es.final_return, es.cumulative_cost, static_cast<long long>(steps),
                  static_cast<long long>(unequal), ss.final_return, ss.cumulative_cost)};
}

// Criterion 10 -------------------------------------------------------------

Verdict determinism_and_interfaces(const fs::path& config_path, const fs::path& work) {
  const fs::path a = work / "cli_a", b = work / "cli_b";
  fs::remove_all(a);
  fs::remove_all(b);
  std::ostringstream out, err;
  const std::vector<std::string> common{"--config", config_path.string(), "--set", "total_steps=5000", "--set",
                                        "checkpoint_every=2500", "--seed", "3"};
  auto invoke = [&](const fs::path& dir) {
    std::vector<std::string> args{"train"};
    args.insert(args.end(), common.begin(), common.end());
    args.push_back("--out");
    args.push_back(dir.string());
    return cli::run_cli(args, out, err);
  };
  const int sa = invoke(a), sb = invoke(b);
  const std::string ma = slurp(a / "metrics.csv"), mb = slurp(b / "metrics.csv");
  const bool identical = sa == 0 && sb == 0 && !ma.empty() && ma == mb;
  const std::string header = ma.substr(0, ma.find('\n'));
  const bool schema = header == harness::kMetricsHeader;

  const fs::path ckpt = a / "checkpoints" / "step_5000";
  bool round_trip = false;
  if (fs::exists(ckpt)) {
    const Checkpoint loaded = Checkpoint::load(ckpt);
    loaded.save(work / "resaved");
    harness::Trainer fresh(harness::config_from_checkpoint(loaded));
    fresh.agent().load(loaded);
    fresh.safety_layer().load(loaded);
    fresh.make_checkpoint().save(work / "rebuilt");
    round_trip = slurp(work / "resaved") == slurp(ckpt) && slurp(work / "rebuilt") == slurp(ckpt);
  }
  return {identical && schema && round_trip,
          fmt("metrics.csv %s across two invocations, header %s, checkpoint load/save %s", identical ? "byte-identical" : "DIFFERS",
              schema ? "matches schema" : "MISMATCH", round_trip ? "bit-exact" : "NOT bit-exact")};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Acceptance criteria for the cost-aware action-scaling library"};
  std::string config_path;
  std::vector<int> only;
  std::string work = (fs::temp_directory_path() / "costreg_acceptance").string();
  bool keep = false;
  app.add_option("--config", config_path, "Desk-scale point-mass config")->required()->check(CLI::ExistingFile);
  app.add_option("--only", only, "Criteria to run (default: all)")->delimiter(',');
  app.add_option("--work", work, "Directory for run artifacts");
  app.add_flag("--keep", keep, "Keep run artifacts");
  CLI11_PARSE(app, argc, argv);

  const std::set<int> selected = only.empty() ? std::set<int>{1, 2, 3, 4, 5, 6, 7, 8, 9, 10}
                                              : std::set<int>(only.begin(), only.end());
  TrainConfig base;
  try {
    base = cli::read_config_file(config_path).config;
    base.validate();
  } catch (const std::exception& e) {
    std::cerr << "acceptance: " << e.what() << "\n";
    return 2;
  }
  fs::create_directories(work);
  RunBank bank(base, work);

  const std::vector<std::pair<int, std::function<Verdict()>>> criteria = {
      {1, gradient_integrity},
      {2, scaling_range},
      {3, oracle_agreement},
      {4, cost_critic_chain},
      {5, [&] { return baseline_reduction(base); }},
      {10, [&] { return determinism_and_interfaces(config_path, work); }},
      {6, [&] { return safety_efficacy(bank); }},
      {7, [&] { return lambda_monotonicity(bank); }},
      {8, [&] { return noise_robustness(bank); }},
      {9, [&] { return scaling_modes(bank); }},
  };
  const std::map<int, std::string> names = {
      {1, "gradient integrity"},     {2, "scaling range"},        {3, "regulator oracle agreement"},
      {4, "cost-critic correctness"}, {5, "baseline reduction"},   {6, "desk-scale safety efficacy"},
      {7, "lambda monotonicity"},    {8, "noise robustness"},     {9, "elementwise vs scalar"},
      {10, "determinism and interfaces"}};

  int failures = 0;
  for (const auto& [id, run] : criteria) {
    if (!selected.count(id)) continue;
    Verdict v;
    try {
      v = run();
    } catch (const std::exception& e) {
      v = {false, std::string("exception: ") + e.what()};
    }
    failures += v.pass ? 0 : 1;
    std::cout << "criterion " << id << " [" << (v.pass ? "PASS" : "FAIL") << "] " << names.at(id) << ": " << v.detail
              << std::endl;
  }
  if (!keep) fs::remove_all(work);
  std::cout << (failures ? "acceptance: " + std::to_string(failures) + " criterion(s) failed" : "acceptance: all passed")
            << std::endl;
  return failures ? 1 : 0;
}
