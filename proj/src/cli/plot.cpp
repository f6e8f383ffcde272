#include "costreg/cli/plot.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "costreg/errors.hpp"
#include "costreg/harness/metrics.hpp"

namespace costreg::cli {

namespace {

constexpr double kWidth = 720.0;
constexpr double kHeight = 360.0;
constexpr double kMargin = 48.0;

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.3f", v);
  return buf;
}

}  // namespace

bool is_plottable_metric(const std::string& name) {
  return name == "ep_return" || name == "cum_cost" || name == "ret_over_logcost";
}

std::vector<double> trailing_mean(const std::vector<double>& values, int window) {
  if (window < 1) throw ConfigurationError("smoothing window must be >= 1");
  std::vector<double> out(values.size());
  double sum = 0.0;
  for (std::size_t i = 0; i < values.size(); ++i) {
    sum += values[i];
    if (i >= static_cast<std::size_t>(window)) sum -= values[i - window];
    const std::size_t n = std::min<std::size_t>(i + 1, window);
    out[i] = sum / static_cast<double>(n);
  }
  return out;
}

AggregatedSeries aggregate_runs(const PlotSpec& spec) {
  if (!is_plottable_metric(spec.metric))
    throw ConfigurationError("unknown plot metric '" + spec.metric + "' (ep_return, cum_cost, ret_over_logcost)");
  if (spec.runs.empty()) throw ConfigurationError("plot needs at least one run directory");

  std::vector<std::vector<double>> values, steps;
  for (const auto& run : spec.runs) {
    const auto path = run / "metrics.csv";
    if (!std::filesystem::exists(path)) throw ArtifactError("missing " + path.string());
    const harness::CsvTable table = harness::read_csv(path);
    const int col = table.column(spec.metric);
    if (col < 0) throw ConfigurationError("metric '" + spec.metric + "' is not in the header of " + path.string());
    const int step_col = table.column("step");
    std::vector<double> v, s;
    for (const auto& row : table.rows) {
      v.push_back(row[col]);
      s.push_back(step_col >= 0 ? row[step_col] : static_cast<double>(s.size()));
    }
    values.push_back(trailing_mean(v, spec.smoothing));
    steps.push_back(std::move(s));
  }

  std::size_t n = values.front().size();
  for (const auto& v : values) n = std::min(n, v.size());
  AggregatedSeries out;
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<double> at;
    double step = 0.0;
    for (std::size_t r = 0; r < values.size(); ++r) {
      at.push_back(values[r][i]);
      step += steps[r][i];
    }
    const harness::Summary s = harness::summarize(at);
    out.step.push_back(step / static_cast<double>(values.size()));
    out.mean.push_back(s.mean);
    out.stddev.push_back(s.stddev);
  }
  return out;
}

std::string render_svg(const AggregatedSeries& series, const std::string& metric) {
  const std::size_t n = series.mean.size();
  double x_lo = 0.0, x_hi = 1.0, y_lo = 0.0, y_hi = 1.0;
  if (n > 0) {
    x_lo = *std::min_element(series.step.begin(), series.step.end());
    x_hi = *std::max_element(series.step.begin(), series.step.end());
    y_lo = y_hi = series.mean[0];
    for (std::size_t i = 0; i < n; ++i) {
      y_lo = std::min(y_lo, series.mean[i] - series.stddev[i]);
      y_hi = std::max(y_hi, series.mean[i] + series.stddev[i]);
    }
  }
  if (x_hi <= x_lo) x_hi = x_lo + 1.0;
  if (y_hi <= y_lo) {
    y_lo -= 0.5;
    y_hi += 0.5;
  }
  auto px = [&](double x) { return kMargin + (x - x_lo) / (x_hi - x_lo) * (kWidth - 2 * kMargin); };
  auto py = [&](double y) { return kHeight - kMargin - (y - y_lo) / (y_hi - y_lo) * (kHeight - 2 * kMargin); };

  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\"" << kHeight
      << "\" viewBox=\"0 0 " << kWidth << " " << kHeight << "\">\n";
  svg << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  svg << "<line x1=\"" << kMargin << "\" y1=\"" << kHeight - kMargin << "\" x2=\"" << kWidth - kMargin << "\" y2=\""
      << kHeight - kMargin << "\" stroke=\"black\"/>\n";
  svg << "<line x1=\"" << kMargin << "\" y1=\"" << kMargin << "\" x2=\"" << kMargin << "\" y2=\"" << kHeight - kMargin
      << "\" stroke=\"black\"/>\n";
  svg << "<text x=\"" << kWidth / 2 << "\" y=\"" << kMargin / 2 << "\" text-anchor=\"middle\">" << metric
      << "</text>\n";
  svg << "<text x=\"" << kMargin << "\" y=\"" << kHeight - 8 << "\">" << num(x_lo) << "</text>\n";
  svg << "<text x=\"" << kWidth - kMargin << "\" y=\"" << kHeight - 8 << "\" text-anchor=\"end\">" << num(x_hi)
      << "</text>\n";
  svg << "<text x=\"4\" y=\"" << kHeight - kMargin << "\">" << num(y_lo) << "</text>\n";
  svg << "<text x=\"4\" y=\"" << kMargin << "\">" << num(y_hi) << "</text>\n";

  if (n > 0) {
    svg << "<polygon class=\"band\" fill=\"steelblue\" fill-opacity=\"0.25\" stroke=\"none\" points=\"";
    for (std::size_t i = 0; i < n; ++i)
      svg << num(px(series.step[i])) << "," << num(py(series.mean[i] + series.stddev[i])) << " ";
    for (std::size_t i = n; i-- > 0;)
      svg << num(px(series.step[i])) << "," << num(py(series.mean[i] - series.stddev[i])) << " ";
    svg << "\"/>\n";
    svg << "<polyline class=\"mean\" fill=\"none\" stroke=\"steelblue\" stroke-width=\"2.5\" points=\"";
    for (std::size_t i = 0; i < n; ++i) {
      if (i) svg << " ";
      svg << num(px(series.step[i])) << "," << num(py(series.mean[i]));
    }
    svg << "\"/>\n";
  }
  svg << "</svg>\n";
  return svg.str();
}

void write_plot(const PlotSpec& spec) {
  const AggregatedSeries series = aggregate_runs(spec);
  if (spec.output.empty()) throw ConfigurationError("plot needs an output path");
  if (spec.output.has_parent_path()) std::filesystem::create_directories(spec.output.parent_path());

  std::ofstream svg(spec.output, std::ios::trunc);
  if (!svg) throw ArtifactError("cannot write " + spec.output.string());
  svg << render_svg(series, spec.metric);

  auto csv_path = spec.output;
  csv_path.replace_extension(".csv");
  std::ofstream csv(csv_path, std::ios::trunc);
  if (!csv) throw ArtifactError("cannot write " + csv_path.string());
  csv << "index,step," << spec.metric << "_mean," << spec.metric << "_std\n";
  for (std::size_t i = 0; i < series.mean.size(); ++i)
    csv << i << "," << harness::format_metric(series.step[i]) << "," << harness::format_metric(series.mean[i]) << ","
        << harness::format_metric(series.stddev[i]) << "\n";
}

}  // namespace costreg::cli
