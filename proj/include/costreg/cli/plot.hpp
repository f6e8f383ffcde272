#pragma once

#include <filesystem>
#include <string>
#include <vector>

namespace costreg::cli {

struct PlotSpec {
  std::string metric = "ep_return";  // ep_return, cum_cost or ret_over_logcost
  std::vector<std::filesystem::path> runs;
  int smoothing = 1;  // trailing moving-average window, in episodes
  std::filesystem::path output;  // .svg; the aggregated CSV goes next to it with a .csv extension
};

bool is_plottable_metric(const std::string& name);

/// Mean and standard deviation across runs, per episode index. Runs are truncated to
/// the shortest one.
struct AggregatedSeries {
  std::vector<double> step;  // mean step at which each episode ended
  std::vector<double> mean;
  std::vector<double> stddev;
};

AggregatedSeries aggregate_runs(const PlotSpec& spec);
std::vector<double> trailing_mean(const std::vector<double>& values, int window);

std::string render_svg(const AggregatedSeries& series, const std::string& metric);

/// Writes the SVG and companion CSV. Throws ConfigurationError for an unknown metric or
/// one missing from a metrics header, ArtifactError for unreadable runs.
void write_plot(const PlotSpec& spec);

}  // namespace costreg::cli
