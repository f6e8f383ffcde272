#include "costreg/harness/sweep.hpp"

#include <atomic>
#include <fstream>
#include <thread>

#include "costreg/errors.hpp"

namespace costreg::harness {

SweepAxis sweep_axis_from_string(const std::string& name) {
  if (name == "lambda") return SweepAxis::lambda;
  if (name == "beta") return SweepAxis::beta;
  if (name == "noise") return SweepAxis::noise;
  if (name == "scaling_mode") return SweepAxis::scaling_mode;
  throw ConfigurationError("unknown sweep axis '" + name + "' (lambda, beta, noise, scaling_mode)");
}

std::string to_string(SweepAxis axis) {
  switch (axis) {
    case SweepAxis::lambda: return "lambda";
    case SweepAxis::beta: return "beta";
    case SweepAxis::noise: return "noise";
    case SweepAxis::scaling_mode: return "scaling_mode";
  }
  return "lambda";
}

TrainConfig apply_axis(const TrainConfig& base, SweepAxis axis, const std::string& value) {
  TrainConfig c = base;
  switch (axis) {
    case SweepAxis::lambda: apply_setting(c, "lambda", value); break;
    case SweepAxis::beta: apply_setting(c, "beta", value); break;
    case SweepAxis::noise: apply_setting(c, "noise_sigma", value); break;
    case SweepAxis::scaling_mode:
      if (value == "elementwise") c.scalar_mode = false;
      else if (value == "scalar") c.scalar_mode = true;
      else throw ConfigurationError("scaling_mode values are 'elementwise' or 'scalar', got '" + value + "'");
      break;
  }
  return c;
}

SweepResult sweep(const TrainConfig& base, SweepAxis axis, const std::vector<std::string>& values, int seeds,
                  const std::optional<std::filesystem::path>& out_dir, int jobs) {
  if (values.empty()) throw ConfigurationError("sweep needs at least one value");
  if (seeds < 1) throw ConfigurationError("sweep needs at least one seed");

  SweepResult result;
  result.axis = axis;
  std::vector<TrainConfig> configs;
  for (const auto& v : values) {
    SweepCell cell;
    cell.value = v;
    const TrainConfig cfg = apply_axis(base, axis, v);  // rejects malformed values before any run starts
    for (int k = 0; k < seeds; ++k) {
      SweepRun run;
      run.value = v;
      run.seed = base.seed + static_cast<std::uint64_t>(k);
      if (out_dir) run.directory = *out_dir / (to_string(axis) + "_" + v) / ("seed_" + std::to_string(run.seed));
      cell.runs.push_back(run);
      configs.push_back(cfg);
      configs.back().seed = run.seed;
    }
    result.cells.push_back(std::move(cell));
  }

  std::vector<SweepRun*> runs;
  for (auto& cell : result.cells)
    for (auto& run : cell.runs) runs.push_back(&run);

  std::atomic<std::size_t> next{0};
  auto worker = [&]() {
    for (std::size_t i = next++; i < runs.size(); i = next++) {
      SweepRun& run = *runs[i];
      try {
        std::optional<std::filesystem::path> dir;
        if (out_dir) dir = run.directory;
        const RunArtifact artifact = train(configs[i], dir);
        if (artifact.ok()) run.summary = summarize_run(artifact);
        else run.error = *artifact.error;
      } catch (const std::exception& e) {
        run.error = e.what();
      }
    }
  };
  const int workers = std::max(1, std::min<int>(jobs, static_cast<int>(runs.size())));
  if (workers == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }

  for (auto& cell : result.cells) {
    std::vector<double> ret, cost, rc, rlc;
    for (const auto& run : cell.runs) {
      if (!run.summary) {
        ++cell.failures;
        continue;
      }
      ret.push_back(run.summary->final_return);
      cost.push_back(run.summary->cumulative_cost);
      rc.push_back(run.summary->rc_ratio);
      rlc.push_back(run.summary->return_over_log_cost);
    }
    cell.final_return = summarize(ret);
    cell.cumulative_cost = summarize(cost);
    cell.rc_ratio = summarize(rc);
    cell.return_over_log_cost = summarize(rlc);
  }
  return result;
}

void write_sweep_summary(const std::filesystem::path& path, const SweepResult& result) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw ArtifactError("cannot write " + path.string());
  out << "axis,value,runs,failures,final_return_mean,final_return_std,cum_cost_mean,cum_cost_std,rc_ratio_mean,"
         "rc_ratio_std,ret_over_logcost_mean,ret_over_logcost_std\n";
  for (const auto& c : result.cells) {
    out << to_string(result.axis) << "," << c.value << "," << c.runs.size() << "," << c.failures;
    for (const Summary& s : {c.final_return, c.cumulative_cost, c.rc_ratio, c.return_over_log_cost})
      out << "," << format_metric(s.mean) << "," << format_metric(s.stddev);
    out << "\n";
  }
}

}  // namespace costreg::harness
