#include "costreg/cli/commands.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <filesystem>
#include <ostream>
#include <sstream>

#include "costreg/cli/config_file.hpp"
#include "costreg/cli/plot.hpp"
#include "costreg/errors.hpp"
#include "costreg/harness/evaluate.hpp"
#include "costreg/harness/metrics.hpp"
#include "costreg/harness/sweep.hpp"
#include "costreg/harness/trainer.hpp"

namespace costreg::cli {

namespace {

constexpr const char* kSeedVariable = "COSTREG_SEED";

// --seed wins, then an explicit seed key, then COSTREG_SEED.
void resolve_seed(ParsedConfig& parsed, const std::optional<unsigned long long>& flag) {
  if (flag) {
    parsed.config.seed = *flag;
    return;
  }
  if (parsed.keys.count("seed")) return;
  if (const char* env = std::getenv(kSeedVariable)) {
    try {
      harness::apply_setting(parsed.config, "seed", env);
    } catch (const ConfigurationError&) {
      throw ConfigurationError(std::string(kSeedVariable) + " is not a nonnegative integer: '" + env + "'");
    }
  }
}

ParsedConfig load_config(const std::string& path, const std::vector<std::string>& overrides,
                         const std::optional<unsigned long long>& seed) {
  ParsedConfig parsed = read_config_file(path);
  apply_overrides(parsed, overrides);
  resolve_seed(parsed, seed);
  parsed.config.validate();
  return parsed;
}

template <typename F>
int guarded(std::ostream& err, F&& body) {
  try {
    return body();
  } catch (const ConfigurationError& e) {
    err << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const ArtifactError& e) {
    err << "error: " << e.what() << "\n";
    return kArtifact;
  } catch (const NumericError& e) {
    err << "numeric abort: " << e.what() << "\n";
    return kNumeric;
  } catch (const std::filesystem::filesystem_error& e) {
    err << "error: " << e.what() << "\n";
    return kArtifact;
  }
}

}  // namespace

int cmd_train(const TrainOptions& opts, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    if (opts.config.empty()) throw ConfigurationError("train requires --config PATH");
    if (opts.out.empty()) throw ConfigurationError("train requires --out DIR");
    const ParsedConfig parsed = load_config(opts.config, opts.overrides, opts.seed);
    const harness::RunArtifact artifact = harness::train(parsed.config, opts.out);
    if (!artifact.ok()) {
      err << "numeric abort: " << *artifact.error << "\n";
      return static_cast<int>(kNumeric);
    }
    const harness::RunSummary s = harness::summarize_run(artifact);
    out << "train steps=" << artifact.steps_completed << " episodes=" << artifact.metrics.size()
        << " final_return=" << harness::format_metric(s.final_return)
        << " cum_cost=" << harness::format_metric(s.cumulative_cost)
        << " rc_ratio=" << harness::format_metric(s.rc_ratio) << " out=" << opts.out << "\n";
    return static_cast<int>(kOk);
  });
}

int cmd_eval(const EvalOptions& opts, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    if (opts.checkpoint.empty()) throw ConfigurationError("eval requires --checkpoint PATH");
    if (opts.episodes < 0) throw ConfigurationError("--episodes must be >= 0");
    if (!std::filesystem::exists(opts.checkpoint)) throw ArtifactError("checkpoint not found: " + opts.checkpoint);
    const Checkpoint ckpt = Checkpoint::load(opts.checkpoint);
    Rng rng(opts.seed);
    const harness::EvalSummary s = harness::evaluate(ckpt, opts.episodes, opts.deterministic, rng);
    out << harness::format_eval_table(s) << harness::format_eval_line(s) << "\n";
    return static_cast<int>(kOk);
  });
}

int cmd_sweep(const SweepOptions& opts, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    if (opts.config.empty()) throw ConfigurationError("sweep requires --config PATH");
    if (opts.out.empty()) throw ConfigurationError("sweep requires --out DIR");
    if (opts.values.empty()) throw ConfigurationError("sweep requires a non-empty --values list");
    if (opts.jobs < 1) throw ConfigurationError("--jobs must be >= 1");
    const harness::SweepAxis axis = harness::sweep_axis_from_string(opts.axis);
    const ParsedConfig parsed = load_config(opts.config, opts.overrides, std::nullopt);
    const std::filesystem::path dir(opts.out);
    const harness::SweepResult result = harness::sweep(parsed.config, axis, opts.values, opts.seeds, dir, opts.jobs);
    std::filesystem::create_directories(dir);
    harness::write_sweep_summary(dir / "summary.csv", result);
    int failures = 0;
    for (const auto& cell : result.cells) {
      out << "cell " << harness::to_string(axis) << "=" << cell.value << " runs=" << cell.runs.size()
          << " failures=" << cell.failures << " final_return=" << harness::format_metric(cell.final_return.mean)
          << " cum_cost=" << harness::format_metric(cell.cumulative_cost.mean) << "\n";
      for (const auto& run : cell.runs)
        if (!run.summary) err << "run " << run.directory.string() << " failed: " << run.error << "\n";
      failures += cell.failures;
    }
    return failures ? static_cast<int>(kNumeric) : static_cast<int>(kOk);
  });
}

int cmd_plot(const PlotOptions& opts, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    PlotSpec spec;
    spec.metric = opts.metric;
    for (const auto& r : opts.runs) spec.runs.emplace_back(r);
    spec.smoothing = opts.smoothing;
    spec.output = opts.out;
    write_plot(spec);
    auto csv = spec.output;
    csv.replace_extension(".csv");
    out << "plot metric=" << spec.metric << " svg=" << spec.output.string() << " csv=" << csv.string() << "\n";
    return static_cast<int>(kOk);
  });
}

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Cost-aware action scaling for safe off-policy reinforcement learning", "costreg"};
  app.require_subcommand(1);

  TrainOptions train;
  unsigned long long train_seed = 0;
  auto* train_cmd = app.add_subcommand("train", "Train an agent and write a run directory");
  train_cmd->add_option("--config", train.config, "Config file (key=value lines)")->required();
  auto* seed_opt = train_cmd->add_option("--seed", train_seed, "Seed (falls back to COSTREG_SEED)");
  train_cmd->add_option("--out", train.out, "Output run directory")->required();
  train_cmd->add_option("--set", train.overrides, "Override key=value, applied after the file")
      ->allow_extra_args(false);

  EvalOptions eval;
  auto* eval_cmd = app.add_subcommand("eval", "Evaluate a checkpoint with frozen parameters");
  eval_cmd->add_option("--checkpoint", eval.checkpoint, "Checkpoint file")->required();
  eval_cmd->add_option("--episodes", eval.episodes, "Number of episodes");
  eval_cmd->add_flag("--deterministic", eval.deterministic, "Use the mean action");
  eval_cmd->add_option("--seed", eval.seed, "Evaluation seed");

  SweepOptions sweep;
  std::string values_csv;
  auto* sweep_cmd = app.add_subcommand("sweep", "Grid sweep over one axis and several seeds");
  sweep_cmd->add_option("--config", sweep.config, "Base config file")->required();
  sweep_cmd->add_option("--axis", sweep.axis, "lambda, beta, noise or scaling_mode")->required();
  sweep_cmd->add_option("--values", values_csv, "Comma-separated values")->required();
  sweep_cmd->add_option("--seeds", sweep.seeds, "Seeds per value");
  sweep_cmd->add_option("--out", sweep.out, "Output directory")->required();
  sweep_cmd->add_option("--jobs", sweep.jobs, "Concurrent runs");
  sweep_cmd->add_option("--set", sweep.overrides, "Override key=value")->allow_extra_args(false);

  PlotOptions plot;
  auto* plot_cmd = app.add_subcommand("plot", "Render an SVG line chart and aggregated CSV");
  plot_cmd->add_option("--runs", plot.runs, "Run directories")->required();
  plot_cmd->add_option("--metric", plot.metric, "ep_return, cum_cost or ret_over_logcost");
  plot_cmd->add_option("--smooth", plot.smoothing, "Trailing moving-average window");
  plot_cmd->add_option("--out", plot.out, "Output .svg path")->required();

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n" << app.help();
    return kUsage;
  }

  if (*train_cmd) {
    if (*seed_opt) train.seed = train_seed;
    return cmd_train(train, out, err);
  }
  if (*eval_cmd) return cmd_eval(eval, out, err);
  if (*sweep_cmd) {
    std::stringstream ss(values_csv);
    std::string item;
    while (std::getline(ss, item, ','))
      if (!item.empty()) sweep.values.push_back(item);
    return cmd_sweep(sweep, out, err);
  }
  if (*plot_cmd) return cmd_plot(plot, out, err);
  return kUsage;
}

}  // namespace costreg::cli
