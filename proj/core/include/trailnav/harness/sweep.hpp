#ifndef TRAILNAV_HARNESS_SWEEP_HPP
#define TRAILNAV_HARNESS_SWEEP_HPP

#include <cstdint>
#include <filesystem>
#include <functional>
#include <string>
#include <vector>

#include "trailnav/harness/run.hpp"

namespace trailnav::harness
{

struct SweepRow
{
  double weight = 0.0;
  std::uint64_t seed = 0;
  sim::RunMetrics metrics;
  std::string failure;
  std::size_t tree_node_violations = 0;
  std::size_t trajectory_violations = 0;
  double wall_seconds = 0.0;
};

struct SweepSummary
{
  double weight = 0.0;
  std::size_t runs = 0;
  std::size_t successes = 0;
  double mean_time = 0.0;
  double std_time = 0.0;
  double mean_distance = 0.0;
  double std_distance = 0.0;
  double mean_pct_on_trail = 0.0;
  double std_pct_on_trail = 0.0;
};

struct SweepReport
{
  std::vector<SweepRow> rows;
  /// One per weight, in input order; aggregates cover every row of that weight.
  std::vector<SweepSummary> summaries;
};

/// Arithmetic mean; NaN for no values.
double mean_of(const std::vector<double> & v);
/// Sample (n - 1) standard deviation; NaN below two values.
double sample_std(const std::vector<double> & v);

/// Runs every (weight, seed) cell, weight-major. A run that throws a
/// navigation error becomes a failed row and the sweep continues.
/// Throws ParamError for an empty weight or seed list.
SweepReport run_sweep(const RunConfig & base, const sim::WorldModel & world, const std::vector<double> & weights,
  const std::vector<std::uint64_t> & seeds, const std::function<void(const SweepRow &)> & on_row = {});

/// Raw rows: w,seed,time_s,distance_m,pct_on_trail,success
std::string sweep_rows_csv(const SweepReport & report);
/// Per weight: w,runs,successes,mean_time_s,std_time_s,mean_distance_m,
/// std_distance_m,mean_pct_on_trail,std_pct_on_trail (sample std).
std::string sweep_summary_csv(const SweepReport & report);

}  // namespace trailnav::harness

#endif  // TRAILNAV_HARNESS_SWEEP_HPP
