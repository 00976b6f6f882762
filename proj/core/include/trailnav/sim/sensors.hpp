#ifndef TRAILNAV_SIM_SENSORS_HPP
#define TRAILNAV_SIM_SENSORS_HPP

#include <optional>
#include <vector>

#include "trailnav/geometry.hpp"
#include "trailnav/random.hpp"
#include "trailnav/semantic.hpp"
#include "trailnav/sensor_pipeline.hpp"
#include "trailnav/sim/world.hpp"

namespace trailnav::sim
{

struct RayHit
{
  double range = 0.0;
  Point3 point = Point3::Zero();
  SemanticClass label = SemanticClass::unlabeled;
};

/// First intersection of origin + t * direction (unit) with the heightfield
/// or an obstacle for 0 < t <= max_range. The heightfield is marched at
/// half-cell steps and refined by bisection.
std::optional<RayHit> cast_ray(const WorldModel & world, const Point3 & origin, const Point3 & direction,
  double max_range);

/// Camera mounted on the robot base: `height` above the base, pitched down by
/// `pitch` radians, looking along the base +x axis.
struct CameraMount
{
  double height = 0.6;
  double pitch = 0.35;

  /// Camera (x right, y down, z forward) to base frame.
  RigidTransform camera_to_base() const;
};

/// Rotating range sensor with its axes aligned to the base frame.
struct ScanPattern
{
  std::size_t azimuth_count = 360;
  /// Ring elevations in radians; negative looks down.
  std::vector<double> elevations;
  double max_range = 8.0;
  double range_noise = 0.0;
  double mount_height = 0.8;

  /// `count` rings evenly spaced in [lo, hi].
  static std::vector<double> uniform_rings(double lo, double hi, std::size_t count);

  RigidTransform sensor_to_base() const {return RigidTransform::from_translation({0.0, 0.0, mount_height});}
};

/// Depth and labels rendered from `true_base` (base frame to world). Each hit
/// pixel's label is replaced with probability `label_noise` by one of the other
/// labelled classes, uniformly. Pixels without a hit get depth NaN and label
/// unlabeled. The returned pose is `reported_base` * camera_to_base, i.e. the
/// camera pose as the robot believes it to be.
SensorFrame render_frame(const WorldModel & world, const RigidTransform & true_base,
  const RigidTransform & reported_base, const CameraIntrinsics & intrinsics, const CameraMount & mount,
  double label_noise, Rng & rng, double timestamp = 0.0);

/// One return per ray that hits within max_range, in the sensor frame.
/// Range noise, if any, is Gaussian along the ray.
PointCloud render_scan(const WorldModel & world, const RigidTransform & true_base, const ScanPattern & pattern,
  Rng & rng);

}  // namespace trailnav::sim

#endif  // TRAILNAV_SIM_SENSORS_HPP
