#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace costreg::cli {

/// Process exit statuses.
enum ExitCode : int { kOk = 0, kUsage = 2, kArtifact = 3, kNumeric = 4 };

struct TrainOptions {
  std::string config;
  std::optional<unsigned long long> seed;
  std::string out;
  std::vector<std::string> overrides;
};

struct EvalOptions {
  std::string checkpoint;
  long long episodes = 10;
  bool deterministic = false;
  unsigned long long seed = 0;
};

struct SweepOptions {
  std::string config;
  std::string axis;
  std::vector<std::string> values;
  int seeds = 3;
  std::string out;
  int jobs = 1;
  std::vector<std::string> overrides;
};

struct PlotOptions {
  std::vector<std::string> runs;
  std::string metric = "ep_return";
  int smoothing = 1;
  std::string out;
};

int cmd_train(const TrainOptions& opts, std::ostream& out, std::ostream& err);
int cmd_eval(const EvalOptions& opts, std::ostream& out, std::ostream& err);
int cmd_sweep(const SweepOptions& opts, std::ostream& out, std::ostream& err);
int cmd_plot(const PlotOptions& opts, std::ostream& out, std::ostream& err);

/// Parses argv (subcommand first) and dispatches. Returns the exit status.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace costreg::cli
