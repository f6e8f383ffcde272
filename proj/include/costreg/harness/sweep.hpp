#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "costreg/harness/metrics.hpp"
#include "costreg/harness/train_config.hpp"
#include "costreg/harness/trainer.hpp"

namespace costreg::harness {

enum class SweepAxis { lambda, beta, noise, scaling_mode };

SweepAxis sweep_axis_from_string(const std::string& name);
std::string to_string(SweepAxis axis);

/// Applies one axis value ("0.0015", "elementwise", ...) to a config copy.
TrainConfig apply_axis(const TrainConfig& base, SweepAxis axis, const std::string& value);

struct SweepRun {
  std::string value;
  std::uint64_t seed = 0;
  std::filesystem::path directory;
  std::optional<RunSummary> summary;  // empty when the run failed
  std::string error;
};

struct SweepCell {
  std::string value;
  std::vector<SweepRun> runs;
  int failures = 0;
  Summary final_return;
  Summary cumulative_cost;
  Summary rc_ratio;
  Summary return_over_log_cost;
};

struct SweepResult {
  SweepAxis axis = SweepAxis::lambda;
  std::vector<SweepCell> cells;
};

/// Runs values x seeds (seeds base.seed, base.seed + 1, ...). Run k of value v writes to
/// out_dir/<axis>_<v>/seed_<s>. A failed run is recorded and the sweep continues.
/// Up to `jobs` runs execute concurrently.
SweepResult sweep(const TrainConfig& base, SweepAxis axis, const std::vector<std::string>& values, int seeds,
                  const std::optional<std::filesystem::path>& out_dir, int jobs = 1);

/// summary.csv: one row per cell with mean and standard deviation of the run summaries.
void write_sweep_summary(const std::filesystem::path& path, const SweepResult& result);

}  // namespace costreg::harness
