#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "costreg/numeric/types.hpp"

namespace costreg::harness {

/// Exact header of metrics.csv.
inline constexpr const char* kMetricsHeader =
    "step,episode,ep_return,ep_cost,cum_cost,rc_ratio,ret_over_logcost,mean_rho,actor_loss,rcritic_loss,"
    "ccritic_loss,reg_loss";

struct MetricsRow {
  std::int64_t step = 0;     // environment steps completed when the episode ended
  std::int64_t episode = 0;  // 0-based
  double ep_return = 0.0;
  double ep_cost = 0.0;
  double cum_cost = 0.0;
  double rc_ratio = 0.0;
  double ret_over_logcost = 0.0;
  double mean_rho = 1.0;
  Vector rho_dims;  // per-dimension episode mean of rho
  // Mean losses over the gradient steps taken during the episode; NaN when none ran.
  double actor_loss = 0.0;
  double rcritic_loss = 0.0;
  double ccritic_loss = 0.0;
  double reg_loss = 0.0;
};

struct RcMetrics {
  double rc_ratio = 0.0;
  double return_over_log_cost = 0.0;
};

/// rc_ratio = R / max(C, 1); return_over_log_cost = R / log(e + C).
RcMetrics compute_rc(double total_return, double cumulative_cost);

/// Formats a value with 6 significant digits.
std::string format_metric(double value);

std::string metrics_csv_line(const MetricsRow& row);
void write_metrics_csv(const std::filesystem::path& path, const std::vector<MetricsRow>& rows);
/// Sidecar with per-dimension episode-mean rho: step,episode,rho_0,...,rho_{d-1}.
void write_rho_csv(const std::filesystem::path& path, const std::vector<MetricsRow>& rows);

/// Parsed CSV table: header names and numeric rows.
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;

  /// Column index, or -1.
  int column(const std::string& name) const;
};

/// Reads a numeric CSV with a header line. Throws ArtifactError on malformed input.
CsvTable read_csv(const std::filesystem::path& path);

struct Summary {
  double mean = 0.0;
  double stddev = 0.0;  // sample standard deviation; 0 for a single value
};
Summary summarize(const std::vector<double>& values);
double median(std::vector<double> values);

}  // namespace costreg::harness
