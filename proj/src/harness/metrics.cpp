#include "costreg/harness/metrics.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <sstream>

#include "costreg/errors.hpp"

namespace costreg::harness {

RcMetrics compute_rc(double total_return, double cumulative_cost) {
  if (cumulative_cost < 0.0) throw ConfigurationError("cumulative cost must be nonnegative");
  return RcMetrics{total_return / std::max(cumulative_cost, 1.0),
                   total_return / std::log(std::numbers::e + cumulative_cost)};
}

std::string format_metric(double value) {
  char buf[48];
  std::snprintf(buf, sizeof(buf), "%.6g", value);
  return buf;
}

std::string metrics_csv_line(const MetricsRow& r) {
  std::string line = std::to_string(r.step) + "," + std::to_string(r.episode);
  for (double v : {r.ep_return, r.ep_cost, r.cum_cost, r.rc_ratio, r.ret_over_logcost, r.mean_rho, r.actor_loss,
                   r.rcritic_loss, r.ccritic_loss, r.reg_loss}) {
    line += ",";
    line += format_metric(v);
  }
  return line;
}

void write_metrics_csv(const std::filesystem::path& path, const std::vector<MetricsRow>& rows) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw ArtifactError("cannot write " + path.string());
  out << kMetricsHeader << "\n";
  for (const auto& r : rows) out << metrics_csv_line(r) << "\n";
}

void write_rho_csv(const std::filesystem::path& path, const std::vector<MetricsRow>& rows) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw ArtifactError("cannot write " + path.string());
  const Eigen::Index d = rows.empty() ? 0 : rows.front().rho_dims.size();
  out << "step,episode";
  for (Eigen::Index i = 0; i < d; ++i) out << ",rho_" << i;
  out << "\n";
  for (const auto& r : rows) {
    out << r.step << "," << r.episode;
    for (Eigen::Index i = 0; i < r.rho_dims.size(); ++i) out << "," << format_metric(r.rho_dims[i]);
    out << "\n";
  }
}

int CsvTable::column(const std::string& name) const {
  for (std::size_t i = 0; i < header.size(); ++i)
    if (header[i] == name) return static_cast<int>(i);
  return -1;
}

CsvTable read_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ArtifactError("cannot open " + path.string());
  CsvTable table;
  std::string line;
  if (!std::getline(in, line)) throw ArtifactError(path.string() + " is empty");
  {
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) table.header.push_back(cell);
  }
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::vector<double> row;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
      double v = 0.0;
      if (cell == "nan" || cell == "-nan") {
        v = std::nan("");
      } else {
        auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), v);
        if (ec != std::errc() || ptr != cell.data() + cell.size())
          throw ArtifactError(path.string() + ":" + std::to_string(line_no) + ": malformed number '" + cell + "'");
      }
      row.push_back(v);
    }
    if (row.size() != table.header.size())
      throw ArtifactError(path.string() + ":" + std::to_string(line_no) + ": wrong number of columns");
    table.rows.push_back(std::move(row));
  }
  return table;
}

Summary summarize(const std::vector<double>& values) {
  Summary s;
  if (values.empty()) return s;
  double sum = 0.0;
  for (double v : values) sum += v;
  s.mean = sum / static_cast<double>(values.size());
  if (values.size() > 1) {
    double sq = 0.0;
    for (double v : values) sq += (v - s.mean) * (v - s.mean);
    s.stddev = std::sqrt(sq / static_cast<double>(values.size() - 1));
  }
  return s;
}

double median(std::vector<double> values) {
  if (values.empty()) throw ConfigurationError("median of an empty set");
  std::sort(values.begin(), values.end());
  const std::size_t n = values.size();
  return n % 2 == 1 ? values[n / 2] : 0.5 * (values[n / 2 - 1] + values[n / 2]);
}

}  // namespace costreg::harness
