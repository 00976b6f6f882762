#ifndef TRAILNAV_HARNESS_CONFIG_HPP
#define TRAILNAV_HARNESS_CONFIG_HPP

#include <cstdint>
#include <filesystem>
#include <functional>
#include <string>
#include <string_view>
#include <vector>

#include "trailnav/planner.hpp"
#include "trailnav/sensor_pipeline.hpp"
#include "trailnav/sim/robot.hpp"
#include "trailnav/sim/sensors.hpp"

namespace trailnav::harness
{

struct RunConfig
{
  /// Preset name ("path1", "path2") or a world file.
  std::string world = "path1";
  double weight = 0.75;
  std::uint64_t seed = 0;
  /// Artifacts are written here when non-empty.
  std::filesystem::path output_dir;

  PlanConfig planner = default_planner();

  int camera_width = 160;
  int camera_height = 96;
  double camera_hfov = 2.0943951023931957;
  sim::CameraMount camera_mount{};
  double label_noise = 0.0;

  std::size_t scan_azimuths = 180;
  std::size_t scan_rings = 30;
  double scan_elevation_min = -0.7;
  double scan_elevation_max = -0.06;
  double scan_max_range = 7.0;
  double scan_range_noise = 0.01;
  double scan_mount_height = 0.8;

  RangeHeightLimits limits{};
  double voxel_size = 0.1;
  std::size_t sor_k = 10;
  double sor_alpha = 2.0;
  double association_cutoff = 0.3;
  double unmatched_geometric_score = 0.5;
  double merge_radius = 0.1;
  bool use_icp = true;

  double nominal_speed = 1.5;
  double dt = 0.1;
  sim::OdometryNoise odometry{0.01, 0.002};

  /// Distance driven between sense/plan cycles.
  double sense_interval = 1.0;
  /// Radius of the map window handed to the planner.
  double local_radius = 8.0;
  double lookahead = 1.5;
  double corridor_tolerance = 2.0;
  /// Cost-to-go per meter when choosing a frontier node for an unreached goal,
  /// in units of the cost of one meter over the best terrain in view.
  double frontier_weight = 1.5;
  /// A plan counts as progress when the goal distance drops by this much.
  double progress_distance = 0.2;
  /// Plan starts snap to the nearest traversable map point within this range.
  double snap_radius = 1.5;
  double time_limit = 300.0;
  /// Fail when the robot moves less than stall_distance within stall_time.
  double stall_time = 30.0;
  double stall_distance = 0.5;

  static PlanConfig default_planner();

  sim::ScanPattern scan_pattern() const;
  CameraIntrinsics intrinsics() const;
  /// Throws ParamError on invalid values.
  void validate() const;
};

/// One settable configuration key with its section prefix, e.g. "planner.step_size".
struct ConfigKey
{
  std::string name;
  std::string help;
  std::function<void(RunConfig &, const std::string &)> set;
  std::function<std::string(const RunConfig &)> get;
};

const std::vector<ConfigKey> & config_keys();

/// Throws ParamError for an unknown key or a value that does not parse.
void set_config_value(RunConfig & config, std::string_view key, const std::string & value);

/// Flat key=value lines. `#` starts a comment; a `[section]` line prefixes
/// the keys that follow with "section.". Throws InputError when the file
/// cannot be read and ParamError for bad lines.
void load_config_file(RunConfig & config, const std::filesystem::path & path);

/// Every key as key=value, in registry order.
std::string dump_config(const RunConfig & config);

}  // namespace trailnav::harness

#endif  // TRAILNAV_HARNESS_CONFIG_HPP
