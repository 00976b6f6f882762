#include "trailnav/harness/config.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "trailnav/error.hpp"

namespace trailnav::harness
{

PlanConfig RunConfig::default_planner()
{
  PlanConfig p;
  p.max_iterations = 1200;
  p.clearance = 0.45;
  return p;
}

sim::ScanPattern RunConfig::scan_pattern() const
{
  sim::ScanPattern s;
  s.azimuth_count = scan_azimuths;
  s.elevations = sim::ScanPattern::uniform_rings(scan_elevation_min, scan_elevation_max, scan_rings);
  s.max_range = scan_max_range;
  s.range_noise = scan_range_noise;
  s.mount_height = scan_mount_height;
  return s;
}

CameraIntrinsics RunConfig::intrinsics() const
{
  return CameraIntrinsics::from_horizontal_fov(camera_width, camera_height, camera_hfov);
}

void RunConfig::validate() const
{
  planner.validate();
  auto require = [](bool ok, const char * what) {
      if (!ok) {
        throw ParamError(what);
      }
    };
  require(camera_width > 0 && camera_height > 0 && camera_hfov > 0.0 && camera_hfov < M_PI,
    "camera size and field of view are invalid");
  require(weight >= 0.0 && weight <= 1.0, "run.weight must lie in [0, 1]");
  require(label_noise >= 0.0 && label_noise <= 1.0, "camera.label_noise must lie in [0, 1]");
  require(scan_azimuths > 0 && scan_rings > 0 && scan_max_range > 0.0 && scan_range_noise >= 0.0,
    "scan settings must be positive");
  require(limits.min_range >= 0.0 && limits.max_range > limits.min_range, "pipeline range limits are invalid");
  require(voxel_size > 0.0 && sor_k >= 1 && sor_alpha > 0.0, "pipeline filter settings are invalid");
  require(association_cutoff > 0.0 && merge_radius > 0.0, "fusion radii must be positive");
  require(unmatched_geometric_score >= 0.0 && unmatched_geometric_score <= 1.0,
    "fusion.unmatched_geometric_score must lie in [0, 1]");
  require(nominal_speed > 0.0 && dt > 0.0, "robot speed and dt must be positive");
  require(odometry.sigma_translation >= 0.0 && odometry.sigma_rotation >= 0.0, "odometry noise must be non-negative");
  require(sense_interval > 0.0 && local_radius > 0.0 && lookahead >= 0.0 && corridor_tolerance > 0.0,
    "navigation distances must be positive");
  require(frontier_weight >= 0.0 && snap_radius >= 0.0 && progress_distance >= 0.0, "navigation weights must be non-negative");
  require(time_limit > 0.0 && stall_time > 0.0 && stall_distance >= 0.0, "time limits must be positive");
}

namespace
{

double parse_double(const std::string & key, const std::string & v)
{
  double out = 0.0;
  const auto res = std::from_chars(v.data(), v.data() + v.size(), out);
  if (res.ec != std::errc() || res.ptr != v.data() + v.size() || !std::isfinite(out)) {
    throw ParamError("invalid number for " + key + ": '" + v + "'");
  }
  return out;
}

std::uint64_t parse_unsigned(const std::string & key, const std::string & v)
{
  std::uint64_t out = 0;
  const auto res = std::from_chars(v.data(), v.data() + v.size(), out);
  if (res.ec != std::errc() || res.ptr != v.data() + v.size()) {
    throw ParamError("invalid unsigned integer for " + key + ": '" + v + "'");
  }
  return out;
}

bool parse_bool(const std::string & key, const std::string & v)
{
  if (v == "true" || v == "1" || v == "yes" || v == "on") {
    return true;
  }
  if (v == "false" || v == "0" || v == "no" || v == "off") {
    return false;
  }
  throw ParamError("invalid boolean for " + key + ": '" + v + "'");
}

std::string fmt(double v)
{
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

template<typename Field>
ConfigKey real(std::string name, std::string help, Field field)
{
  return {name, std::move(help),
    [field, name](RunConfig & c, const std::string & v) {field(c) = parse_double(name, v);},
    [field](const RunConfig & c) {return fmt(field(const_cast<RunConfig &>(c)));}};
}

template<typename Field>
ConfigKey count(std::string name, std::string help, Field field)
{
  return {name, std::move(help),
    [field, name](RunConfig & c, const std::string & v) {
      field(c) = static_cast<std::remove_reference_t<decltype(field(c))>>(parse_unsigned(name, v));
    },
    [field](const RunConfig & c) {return std::to_string(field(const_cast<RunConfig &>(c)));}};
}

template<typename Field>
ConfigKey flag(std::string name, std::string help, Field field)
{
  return {name, std::move(help),
    [field, name](RunConfig & c, const std::string & v) {field(c) = parse_bool(name, v);},
    [field](const RunConfig & c) {return std::string(field(const_cast<RunConfig &>(c)) ? "true" : "false");}};
}

std::vector<ConfigKey> build_keys()
{
  std::vector<ConfigKey> k;
  k.push_back({"run.world", "preset name (path1, path2) or world file",
      [](RunConfig & c, const std::string & v) {c.world = v;},
      [](const RunConfig & c) {return c.world;}});
  k.push_back(real("run.weight", "fusion weight w in [0, 1]", [](RunConfig & c) -> double & {return c.weight;}));
  k.push_back(count("run.seed", "run seed", [](RunConfig & c) -> std::uint64_t & {return c.seed;}));
  k.push_back({"run.output_dir", "artifact directory (empty: none)",
      [](RunConfig & c, const std::string & v) {c.output_dir = v;},
      [](const RunConfig & c) {return c.output_dir.string();}});

  k.push_back(real("planner.traversability_weight", "edge penalty weight W",
      [](RunConfig & c) -> double & {return c.planner.traversability_weight;}));
  k.push_back(real("planner.step_size", "steer distance",
      [](RunConfig & c) -> double & {return c.planner.step_size;}));
  k.push_back(real("planner.neighbor_radius", "rewire radius",
      [](RunConfig & c) -> double & {return c.planner.neighbor_radius;}));
  k.push_back(count("planner.max_iterations", "iterations per plan",
      [](RunConfig & c) -> std::size_t & {return c.planner.max_iterations;}));
  k.push_back(real("planner.goal_tolerance", "goal radius",
      [](RunConfig & c) -> double & {return c.planner.goal_tolerance;}));
  k.push_back(real("planner.goal_bias", "goal sampling probability",
      [](RunConfig & c) -> double & {return c.planner.goal_bias;}));
  k.push_back(real("planner.interp_radius", "T lookup radius",
      [](RunConfig & c) -> double & {return c.planner.interp_radius;}));
  k.push_back(real("planner.edge_resolution", "edge check spacing",
      [](RunConfig & c) -> double & {return c.planner.edge_resolution;}));
  k.push_back(real("planner.clearance", "keep-out distance from T = 0 points",
      [](RunConfig & c) -> double & {return c.planner.clearance;}));

  k.push_back(count("camera.width", "image width", [](RunConfig & c) -> int & {return c.camera_width;}));
  k.push_back(count("camera.height", "image height", [](RunConfig & c) -> int & {return c.camera_height;}));
  k.push_back(real("camera.hfov", "horizontal field of view, radians",
      [](RunConfig & c) -> double & {return c.camera_hfov;}));
  k.push_back(real("camera.mount_height", "camera height above the base",
      [](RunConfig & c) -> double & {return c.camera_mount.height;}));
  k.push_back(real("camera.pitch", "downward pitch, radians",
      [](RunConfig & c) -> double & {return c.camera_mount.pitch;}));
  k.push_back(real("camera.label_noise", "per-pixel label corruption probability",
      [](RunConfig & c) -> double & {return c.label_noise;}));

  k.push_back(count("scan.azimuths", "rays per ring", [](RunConfig & c) -> std::size_t & {return c.scan_azimuths;}));
  k.push_back(count("scan.rings", "ring count", [](RunConfig & c) -> std::size_t & {return c.scan_rings;}));
  k.push_back(real("scan.elevation_min", "lowest ring, radians",
      [](RunConfig & c) -> double & {return c.scan_elevation_min;}));
  k.push_back(real("scan.elevation_max", "highest ring, radians",
      [](RunConfig & c) -> double & {return c.scan_elevation_max;}));
  k.push_back(real("scan.max_range", "range limit", [](RunConfig & c) -> double & {return c.scan_max_range;}));
  k.push_back(real("scan.range_noise", "Gaussian range noise sigma",
      [](RunConfig & c) -> double & {return c.scan_range_noise;}));
  k.push_back(real("scan.mount_height", "sensor height above the base",
      [](RunConfig & c) -> double & {return c.scan_mount_height;}));

  k.push_back(real("pipeline.min_range", "closest kept camera point",
      [](RunConfig & c) -> double & {return c.limits.min_range;}));
  k.push_back(real("pipeline.max_range", "farthest kept camera point",
      [](RunConfig & c) -> double & {return c.limits.max_range;}));
  k.push_back(real("pipeline.max_height", "height limit above the base",
      [](RunConfig & c) -> double & {return c.limits.max_height;}));
  k.push_back(real("pipeline.voxel_size", "voxel edge", [](RunConfig & c) -> double & {return c.voxel_size;}));
  k.push_back(count("pipeline.sor_k", "outlier filter neighbors", [](RunConfig & c) -> std::size_t & {return c.sor_k;}));
  k.push_back(real("pipeline.sor_alpha", "outlier filter width", [](RunConfig & c) -> double & {return c.sor_alpha;}));

  k.push_back(real("fusion.association_cutoff", "semantic-geometric pairing distance",
      [](RunConfig & c) -> double & {return c.association_cutoff;}));
  k.push_back(real("fusion.unmatched_geometric_score", "C_g for unpaired semantic points",
      [](RunConfig & c) -> double & {return c.unmatched_geometric_score;}));
  k.push_back(real("fusion.merge_radius", "map merge distance", [](RunConfig & c) -> double & {return c.merge_radius;}));
  k.push_back(flag("fusion.use_icp", "register frames by ICP", [](RunConfig & c) -> bool & {return c.use_icp;}));

  k.push_back(real("robot.speed", "nominal speed, m/s", [](RunConfig & c) -> double & {return c.nominal_speed;}));
  k.push_back(real("robot.dt", "control step, s", [](RunConfig & c) -> double & {return c.dt;}));
  k.push_back(real("robot.odometry_sigma_translation", "odometry translation noise per meter",
      [](RunConfig & c) -> double & {return c.odometry.sigma_translation;}));
  k.push_back(real("robot.odometry_sigma_rotation", "odometry heading noise per meter",
      [](RunConfig & c) -> double & {return c.odometry.sigma_rotation;}));

  k.push_back(real("nav.sense_interval", "meters between sense/plan cycles",
      [](RunConfig & c) -> double & {return c.sense_interval;}));
  k.push_back(real("nav.local_radius", "planning window radius",
      [](RunConfig & c) -> double & {return c.local_radius;}));
  k.push_back(real("nav.lookahead", "waypoint lookahead", [](RunConfig & c) -> double & {return c.lookahead;}));
  k.push_back(real("nav.corridor_tolerance", "replan when farther from the path",
      [](RunConfig & c) -> double & {return c.corridor_tolerance;}));
  k.push_back(real("nav.frontier_weight", "frontier cost-to-go per meter, relative to the best terrain in view",
      [](RunConfig & c) -> double & {return c.frontier_weight;}));
  k.push_back(real("nav.progress_distance", "goal-distance gain that resets frontier escalation",
      [](RunConfig & c) -> double & {return c.progress_distance;}));
  k.push_back(real("nav.snap_radius", "plan start snapping range",
      [](RunConfig & c) -> double & {return c.snap_radius;}));
  k.push_back(real("nav.time_limit", "simulated seconds before timeout",
      [](RunConfig & c) -> double & {return c.time_limit;}));
  k.push_back(real("nav.stall_time", "stall window, s", [](RunConfig & c) -> double & {return c.stall_time;}));
  k.push_back(real("nav.stall_distance", "minimum progress per stall window",
      [](RunConfig & c) -> double & {return c.stall_distance;}));
  return k;
}

std::string trim(const std::string & s)
{
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) {
    return {};
  }
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

}  // namespace

const std::vector<ConfigKey> & config_keys()
{
  static const std::vector<ConfigKey> keys = build_keys();
  return keys;
}

void set_config_value(RunConfig & config, std::string_view key, const std::string & value)
{
  for (const auto & k : config_keys()) {
    if (k.name == key) {
      k.set(config, value);
      return;
    }
  }
  throw ParamError("unknown configuration key '" + std::string(key) + "'");
}

void load_config_file(RunConfig & config, const std::filesystem::path & path)
{
  std::ifstream in(path);
  if (!in) {
    throw InputError("cannot read config file " + path.string());
  }
  std::string line;
  std::string section;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string::npos) {
      line.erase(hash);
    }
    line = trim(line);
    if (line.empty()) {
      continue;
    }
    if (line.front() == '[' && line.back() == ']') {
      section = trim(line.substr(1, line.size() - 2));
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ParamError(path.string() + ":" + std::to_string(line_no) + ": expected key=value");
    }
    std::string key = trim(line.substr(0, eq));
    if (!section.empty() && key.find('.') == std::string::npos) {
      key = section + "." + key;
    }
    set_config_value(config, key, trim(line.substr(eq + 1)));
  }
}

std::string dump_config(const RunConfig & config)
{
  std::ostringstream out;
  for (const auto & k : config_keys()) {
    out << k.name << '=' << k.get(config) << '\n';
  }
  return out.str();
}

}  // namespace trailnav::harness
