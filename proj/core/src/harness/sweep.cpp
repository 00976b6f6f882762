#include "trailnav/harness/sweep.hpp"

#include <cmath>
#include <cstdio>
#include <limits>

#include "trailnav/error.hpp"

namespace trailnav::harness
{

double mean_of(const std::vector<double> & v)
{
  if (v.empty()) {
    return std::numeric_limits<double>::quiet_NaN();
  }
  double s = 0.0;
  for (double x : v) {
    s += x;
  }
  return s / static_cast<double>(v.size());
}

double sample_std(const std::vector<double> & v)
{
  if (v.size() < 2) {
    return std::numeric_limits<double>::quiet_NaN();
  }
  const double m = mean_of(v);
  double s = 0.0;
  for (double x : v) {
    s += (x - m) * (x - m);
  }
  return std::sqrt(s / static_cast<double>(v.size() - 1));
}

SweepReport run_sweep(const RunConfig & base, const sim::WorldModel & world, const std::vector<double> & weights,
  const std::vector<std::uint64_t> & seeds, const std::function<void(const SweepRow &)> & on_row)
{
  if (weights.empty() || seeds.empty()) {
    throw ParamError("a sweep needs at least one weight and one seed");
  }
  for (double w : weights) {
    if (!(w >= 0.0 && w <= 1.0)) {
      throw ParamError("sweep weights must lie in [0, 1]");
    }
  }
  base.validate();

  SweepReport report;
  for (double w : weights) {
    SweepSummary summary;
    summary.weight = w;
    std::vector<double> times, distances, pcts;
    for (std::uint64_t seed : seeds) {
      RunConfig cfg = base;
      cfg.weight = w;
      cfg.seed = seed;
      if (!base.output_dir.empty()) {
        char name[64];
        std::snprintf(name, sizeof(name), "w%.2f_s%llu", w, static_cast<unsigned long long>(seed));
        cfg.output_dir = base.output_dir / name;
      }
      SweepRow row;
      row.weight = w;
      row.seed = seed;
      try {
        const RunOutcome out = run_closed_loop(cfg, world);
        row.metrics = out.metrics;
        row.failure = out.failure;
        row.tree_node_violations = out.tree_node_violations;
        row.trajectory_violations = out.trajectory_violations;
        row.wall_seconds = out.wall_seconds;
      } catch (const Error & e) {
        row.failure = e.what();
        row.metrics.success = false;
      }
      times.push_back(row.metrics.time_to_traverse);
      distances.push_back(row.metrics.distance_traveled);
      pcts.push_back(row.metrics.pct_on_trail);
      summary.successes += row.metrics.success ? 1 : 0;
      if (on_row) {
        on_row(row);
      }
      report.rows.push_back(std::move(row));
    }
    summary.runs = seeds.size();
    summary.mean_time = mean_of(times);
    summary.std_time = sample_std(times);
    summary.mean_distance = mean_of(distances);
    summary.std_distance = sample_std(distances);
    summary.mean_pct_on_trail = mean_of(pcts);
    summary.std_pct_on_trail = sample_std(pcts);
    report.summaries.push_back(summary);
  }
  return report;
}

std::string sweep_rows_csv(const SweepReport & report)
{
  std::string out = metrics_csv_header();
  for (const auto & r : report.rows) {
    out += metrics_csv_row(r.weight, r.seed, r.metrics);
  }
  return out;
}

std::string sweep_summary_csv(const SweepReport & report)
{
  std::string out =
    "w,runs,successes,mean_time_s,std_time_s,mean_distance_m,std_distance_m,mean_pct_on_trail,std_pct_on_trail\n";
  char buf[512];
  for (const auto & s : report.summaries) {
    std::snprintf(buf, sizeof(buf), "%.17g,%zu,%zu,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g\n", s.weight, s.runs,
      s.successes, s.mean_time, s.std_time, s.mean_distance, s.std_distance, s.mean_pct_on_trail, s.std_pct_on_trail);
    out += buf;
  }
  return out;
}

}  // namespace trailnav::harness
