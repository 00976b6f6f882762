#ifndef TRAILNAV_HARNESS_RUN_HPP
#define TRAILNAV_HARNESS_RUN_HPP

#include <filesystem>
#include <string>
#include <vector>

#include "trailnav/harness/config.hpp"
#include "trailnav/planner.hpp"
#include "trailnav/sim/metrics.hpp"
#include "trailnav/sim/world.hpp"
#include "trailnav/traversability_map.hpp"

namespace trailnav::harness
{

/// Stable process exit codes.
enum ExitCode : int
{
  kExitOk = 0,
  kExitInput = 1,
  kExitNavigation = 2,
};

struct RunOutcome
{
  sim::RunMetrics metrics;
  std::vector<sim::TrajectorySample> trajectory;
  TraversabilityMap map;
  /// Last plan issued.
  PlanResult last_plan;
  /// Empty on success, otherwise why the run stopped.
  std::string failure;
  std::size_t plans = 0;
  std::size_t registered_frames = 0;
  std::size_t refused_waypoints = 0;
  std::size_t blocked_steps = 0;
  /// Planner tree nodes (over all plans) on ground-truth impassable cells.
  std::size_t tree_nodes_checked = 0;
  std::size_t tree_node_violations = 0;
  /// Trajectory samples on ground-truth impassable cells.
  std::size_t trajectory_violations = 0;
  double wall_seconds = 0.0;

  int exit_code() const {return failure.empty() ? kExitOk : kExitNavigation;}
};

/// Resolves RunConfig::world: a preset name or a world file.
sim::WorldModel load_run_world(const std::string & world);

/// Closed loop until the odometry estimate reaches the goal, a timeout, a
/// stall, or NoTraversableSpace: sense (camera + scan), pipeline, terrain
/// analysis, fusion, map integration, local RRT* plan, next waypoint, step.
/// Navigation failures are reported in RunOutcome::failure; configuration
/// errors throw. Writes artifacts when output_dir is set.
RunOutcome run_closed_loop(const RunConfig & config, const sim::WorldModel & world);

/// Drives the robot along the ground-truth trail while mapping, for offline
/// planning. No planner is involved.
TraversabilityMap build_map_along_trail(const RunConfig & config, const sim::WorldModel & world);

/// "w,seed,time_s,distance_m,pct_on_trail,success" header plus one row.
std::string metrics_csv(double weight, std::uint64_t seed, const sim::RunMetrics & metrics);
std::string metrics_csv_header();
std::string metrics_csv_row(double weight, std::uint64_t seed, const sim::RunMetrics & metrics);

/// metrics.csv, trajectory.csv, map.ply, waypoints.csv, tree.csv.
void write_run_artifacts(const std::filesystem::path & dir, const RunConfig & config, const RunOutcome & outcome);

}  // namespace trailnav::harness

#endif  // TRAILNAV_HARNESS_RUN_HPP
