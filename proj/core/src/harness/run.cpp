#include "trailnav/harness/run.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <memory>
#include <optional>

#include "trailnav/error.hpp"
#include "trailnav/fusion.hpp"
#include "trailnav/sensor_pipeline.hpp"
#include "trailnav/sim/robot.hpp"
#include "trailnav/sim/sensors.hpp"
#include "trailnav/terrain.hpp"

namespace trailnav::harness
{

sim::WorldModel load_run_world(const std::string & world)
{
  if (auto preset = sim::preset_world(world)) {
    return std::move(*preset);
  }
  if (!std::filesystem::exists(world)) {
    throw InputError("world '" + world + "' is neither a preset nor an existing file");
  }
  return sim::load_world_file(world);
}

namespace
{

constexpr std::uint64_t kSensorStream = 1;
constexpr std::uint64_t kRobotStream = 2;
constexpr std::uint64_t kPlanStream = 1000;

/// Sensing, mapping and registration shared by the closed loop and the
/// trail-following mapper.
class Perception
{
public:
  Perception(const RunConfig & config, const sim::WorldModel & world)
  : config_(config),
    world_(world),
    intrinsics_(config.intrinsics()),
    pattern_(config.scan_pattern()),
    weight_(config.weight),
    builder_(integration_params(config)),
    rng_(mix_seed(config.seed, kSensorStream))
  {
  }

  /// Returns true when ICP refined the pose.
  bool sense(sim::RobotState & robot)
  {
    const RigidTransform true_base = robot.pose();
    const RigidTransform est_base = robot.odometry_pose();

    const SensorFrame frame = sim::render_frame(world_, true_base, est_base, intrinsics_, config_.camera_mount,
        config_.label_noise, rng_, robot.clock);
    const LabeledPointCloud raw = backproject(frame, intrinsics_);
    const LabeledPointCloud near = range_height_filter(raw, frame.pose, est_base.translation().z(), config_.limits);
    if (near.empty()) {
      return false;
    }
    const LabeledPointCloud voxels = voxel_downsample(transform_apply(frame.pose, near, Frame::map), config_.voxel_size);
    const LabeledPointCloud semantic = voxels.size() > config_.sor_k ?
      statistical_outlier_removal(voxels, config_.sor_k, config_.sor_alpha) : voxels;

    const PointCloud scan = sim::render_scan(world_, true_base, pattern_, rng_);
    if (semantic.empty() || scan.empty()) {
      return false;
    }
    const PointCloud scan_map = transform_apply(est_base * pattern_.sensor_to_base(), scan, Frame::map);
    const GeometricCloud geometric = analyze_terrain(scan_map);

    FusionParams fp;
    fp.association_cutoff = config_.association_cutoff;
    fp.unmatched_geometric_score = config_.unmatched_geometric_score;
    const FusedCloud fused = fuse_clouds(semantic, geometric, table_, weight_, fp);
    const FusedCloud local = transform_apply(est_base.inverse(), fused, Frame::sensor);

    IntegrationReport report;
    try {
      report = builder_.integrate(local, est_base);
    } catch (const DegenerateGeometry &) {
      report = builder_.integrate(local, est_base, true);
    }
    if (report.registered) {
      robot.correct_odometry(report.pose);
    }
    return report.registered;
  }

  const MapBuilder & builder() const {return builder_;}

private:
  static IntegrationParams integration_params(const RunConfig & config)
  {
    IntegrationParams p;
    p.merge_radius = config.merge_radius;
    p.use_icp = config.use_icp;
    return p;
  }

  const RunConfig & config_;
  const sim::WorldModel & world_;
  CameraIntrinsics intrinsics_;
  sim::ScanPattern pattern_;
  SemanticCostTable table_;
  FusionWeight weight_;
  MapBuilder builder_;
  Rng rng_;
};

double initial_heading(const sim::WorldModel & world)
{
  if (world.trail.size() >= 2) {
    const Point3 d = world.trail[1] - world.trail[0];
    return std::atan2(d.y(), d.x());
  }
  return std::atan2(world.goal.y() - world.start.y(), world.goal.x() - world.start.x());
}

double ground_distance(const Point3 & a, const Point3 & b)
{
  return std::hypot(a.x() - b.x(), a.y() - b.y());
}

// The operating area is a geofence: points within `margin` of the world edge
// become collision space, so no tree node can reach past the edge.
TraversabilityMap fence_map(TraversabilityMap map, const sim::WorldModel & world, double margin)
{
  for (std::size_t i = 0; i < map.size(); ++i) {
    const Point3 & p = map.points[i];
    if (p.x() < margin || p.y() < margin || p.x() > world.size_x() - margin || p.y() > world.size_y() - margin) {
      map.traversability[i] = 0.0;
    }
  }
  return map;
}

}  // namespace

RunOutcome run_closed_loop(const RunConfig & config, const sim::WorldModel & world)
{
  config.validate();
  const auto wall_start = std::chrono::steady_clock::now();

  RunOutcome out;
  Perception perception(config, world);
  sim::RobotState robot = sim::make_robot(world, world.start, initial_heading(world), config.nominal_speed,
      config.odometry, mix_seed(config.seed, kRobotStream));
  const Point3 goal = world.goal;

  auto record = [&]() {
      const Point3 p(robot.truth.x, robot.truth.y, robot.z);
      out.trajectory.push_back({p, robot.clock});
      if (world.impassable_at(p.x(), p.y())) {
        ++out.trajectory_violations;
      }
    };
  record();

  std::vector<Waypoint> path;
  std::optional<TraversabilityField> field;
  bool need_plan = true;
  double driven_since_plan = 0.0;
  double stall_clock = 0.0;
  Point3 stall_anchor = out.trajectory.back().position;
  // Frontier escalation: while the robot stops getting closer to the goal,
  // the cost-to-go weight doubles so costlier detours become attractive.
  double best_goal_distance = ground_distance(world.start, goal);
  std::size_t plans_without_progress = 0;

  try {
    while (true) {
      const Point3 est(robot.odometry.x, robot.odometry.y, robot.z);
      if (ground_distance(est, goal) <= config.planner.goal_tolerance) {
        break;
      }
      if (robot.clock >= config.time_limit) {
        out.failure = "timeout";
        break;
      }
      if (robot.clock - stall_clock >= config.stall_time) {
        const Point3 here(robot.truth.x, robot.truth.y, robot.z);
        if (ground_distance(here, stall_anchor) < config.stall_distance) {
          out.failure = "stalled";
          break;
        }
        stall_clock = robot.clock;
        stall_anchor = here;
      }

      if (need_plan || driven_since_plan >= config.sense_interval) {
        if (perception.sense(robot)) {
          ++out.registered_frames;
        }
        const Point3 pos(robot.odometry.x, robot.odometry.y, robot.z);
        auto local = std::make_shared<const TraversabilityMap>(
          fence_map(crop_map(perception.builder().current(), pos, config.local_radius), world,
          config.planner.interp_radius));
        if (local->empty()) {
          throw NoTraversableSpace("no map points around the robot");
        }
        const TraversabilitySampler sampler(local);
        field.emplace(local, config.planner.interp_radius, config.planner.clearance);

        Point3 start = pos;
        bool snapped = false;
        if (!field->admissible(start)) {
          double best = std::numeric_limits<double>::infinity();
          for (std::size_t i = 0; i < local->size(); ++i) {
            const double d = ground_distance(local->points[i], pos);
            if (d < best && d <= config.snap_radius && field->admissible(local->points[i])) {
              best = d;
              start = local->points[i];
            }
          }
          if (!std::isfinite(best)) {
            throw NoTraversableSpace("no traversable map point near the robot");
          }
          snapped = true;
        }

        const double goal_distance = ground_distance(pos, goal);
        if (goal_distance < best_goal_distance - config.progress_distance) {
          best_goal_distance = goal_distance;
          plans_without_progress = 0;
        } else {
          ++plans_without_progress;
        }

        PlanConfig pc = config.planner;
        pc.rng_seed = mix_seed(config.seed, kPlanStream + out.plans);
        PlanResult result = plan(*field, sampler, start, goal, pc);
        ++out.plans;
        out.tree_nodes_checked += result.tree.size();
        for (const auto & node : result.tree) {
          if (world.impassable_at(node.position.x(), node.position.y())) {
            ++out.tree_node_violations;
          }
        }
        if (result.success) {
          path = result.waypoints;
        } else {
          const double escalation = std::pow(2.0, static_cast<double>(
              std::min<std::size_t>(4, plans_without_progress > 2 ? plans_without_progress - 2 : 0)));
          // Cost-to-go is priced at the cost of one meter over the best
          // terrain in view (95th percentile of positive T), an optimistic
          // estimate, times frontier_weight.
          std::vector<double> positive;
          for (double t : local->traversability) {
            if (t > 0.0) {
              positive.push_back(t);
            }
          }
          double t_ref = 1.0;
          if (!positive.empty()) {
            const auto k = static_cast<std::ptrdiff_t>((positive.size() - 1) * 95 / 100);
            std::nth_element(positive.begin(), positive.begin() + k, positive.end());
            t_ref = positive[static_cast<std::size_t>(k)];
          }
          const double per_meter = t_ref >= 1.0 ? 1.0 : 1.0 + pc.traversability_weight / t_ref;
          const std::size_t node = best_frontier_node(result.tree, goal, config.frontier_weight * per_meter * escalation,
              pc.step_size);
          path = extract_waypoints(result.tree, node, pc.step_size);
        }
        if (snapped) {
          path.insert(path.begin(), Waypoint{pos, 0.0});
        }
        out.last_plan = std::move(result);
        need_plan = false;
        driven_since_plan = 0.0;
      }

      const Point3 est_now(robot.odometry.x, robot.odometry.y, robot.z);
      // Pure pursuit, shortening the lookahead until the chord to the target
      // stays admissible so corners are not cut through obstacles.
      Point3 target = path.front().position;
      try {
        for (double lookahead = config.lookahead; ; lookahead *= 0.5) {
          target = next_waypoint(std::span<const Waypoint>(path), est_now, lookahead, config.corridor_tolerance);
          if (lookahead < 0.2 || field->segment_free(est_now, target, config.planner.edge_resolution)) {
            break;
          }
        }
      } catch (const ReplanRequired &) {
        need_plan = true;
      }

      if (ground_distance(est_now, path.back().position) < 0.05) {
        // Path exhausted short of the goal.
        need_plan = true;
      }

      const double ox = robot.odometry.x;
      const double oy = robot.odometry.y;
      const std::size_t blocked_before = robot.blocked_steps;
      try {
        sim::advance_robot(world, robot, target, config.dt);
      } catch (const RefusedWaypoint &) {
        ++out.refused_waypoints;
        robot.clock += config.dt;
        need_plan = true;
      }
      if (robot.blocked_steps != blocked_before) {
        need_plan = true;
      }
      driven_since_plan += std::hypot(robot.odometry.x - ox, robot.odometry.y - oy);
      record();
    }
  } catch (const NoTraversableSpace & e) {
    out.failure = std::string("NoTraversableSpace: ") + e.what();
  }

  out.blocked_steps = robot.blocked_steps;
  out.map = perception.builder().current();
  out.metrics = sim::score_run(world, out.trajectory);
  out.metrics.success = out.failure.empty();
  out.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - wall_start).count();
  if (!config.output_dir.empty()) {
    write_run_artifacts(config.output_dir, config, out);
  }
  return out;
}

TraversabilityMap build_map_along_trail(const RunConfig & config, const sim::WorldModel & world)
{
  config.validate();
  Perception perception(config, world);
  sim::RobotState robot = sim::make_robot(world, world.start, initial_heading(world), config.nominal_speed,
      config.odometry, mix_seed(config.seed, kRobotStream));
  double since = config.sense_interval;
  for (std::size_t i = 1; i < world.trail.size(); ++i) {
    const Point3 & target = world.trail[i];
    int guard = 0;
    while (std::hypot(target.x() - robot.odometry.x, target.y() - robot.odometry.y) > 1e-6 && guard++ < 1000) {
      if (since >= config.sense_interval) {
        perception.sense(robot);
        since = 0.0;
      }
      const double ox = robot.odometry.x;
      const double oy = robot.odometry.y;
      try {
        sim::advance_robot(world, robot, target, config.dt);
      } catch (const RefusedWaypoint &) {
        break;
      }
      const double moved = std::hypot(robot.odometry.x - ox, robot.odometry.y - oy);
      if (moved == 0.0) {
        break;
      }
      since += moved;
    }
  }
  perception.sense(robot);
  return perception.builder().current();
}

std::string metrics_csv_header()
{
  return "w,seed,time_s,distance_m,pct_on_trail,success\n";
}

std::string metrics_csv_row(double weight, std::uint64_t seed, const sim::RunMetrics & m)
{
  char buf[256];
  std::snprintf(buf, sizeof(buf), "%.17g,%llu,%.17g,%.17g,%.17g,%d\n", weight, static_cast<unsigned long long>(seed),
    m.time_to_traverse, m.distance_traveled, m.pct_on_trail, m.success ? 1 : 0);
  return buf;
}

std::string metrics_csv(double weight, std::uint64_t seed, const sim::RunMetrics & metrics)
{
  return metrics_csv_header() + metrics_csv_row(weight, seed, metrics);
}

void write_run_artifacts(const std::filesystem::path & dir, const RunConfig & config, const RunOutcome & outcome)
{
  std::filesystem::create_directories(dir);
  {
    std::ofstream m(dir / "metrics.csv");
    m << metrics_csv(config.weight, config.seed, outcome.metrics);
  }
  {
    std::ofstream t(dir / "trajectory.csv");
    t << "t,x,y,z\n";
    char buf[160];
    for (const auto & s : outcome.trajectory) {
      std::snprintf(buf, sizeof(buf), "%.3f,%.6f,%.6f,%.6f\n", s.time, s.position.x(), s.position.y(), s.position.z());
      t << buf;
    }
  }
  if (!outcome.map.empty()) {
    write_map(dir / "map.ply", outcome.map);
  }
  write_waypoints_csv(dir / "waypoints.csv", outcome.last_plan.waypoints);
  write_tree_csv(dir / "tree.csv", outcome.last_plan.tree);
}

}  // namespace trailnav::harness
