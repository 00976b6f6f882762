#include "trailnav/sim/sensors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace trailnav::sim
{

namespace
{

constexpr double kInf = std::numeric_limits<double>::infinity();

double terrain_hit(const WorldModel & world, const Point3 & o, const Point3 & d, double max_range)
{
  const double step = world.resolution / 2.0;
  auto gap = [&](double t) {
      const Point3 p = o + d * t;
      return p.z() - world.height_at(p.x(), p.y());
    };
  if (!world.contains(o.x(), o.y()) || gap(0.0) <= 0.0) {
    return kInf;
  }
  const double top = world.max_height();
  // The gap to the ground shrinks by at most `closing` per unit of t, so a
  // stride of gap / closing cannot jump over a crossing.
  const double closing = world.max_slope() * std::hypot(d.x(), d.y()) - d.z();
  double t_prev = 0.0;
  double g_prev = gap(0.0);
  while (t_prev < max_range) {
    if (closing <= 0.0) {
      return kInf;
    }
    const double t = std::min(t_prev + std::max(step, g_prev / closing), max_range);
    const Point3 p = o + d * t;
    if (!world.contains(p.x(), p.y())) {
      return kInf;
    }
    if (d.z() >= 0.0 && p.z() > top) {
      return kInf;
    }
    const double g = gap(t);
    if (g <= 0.0) {
      double lo = t_prev;
      double hi = t;
      for (int i = 0; i < 24; ++i) {
        const double mid = 0.5 * (lo + hi);
        (gap(mid) > 0.0 ? lo : hi) = mid;
      }
      return hi;
    }
    t_prev = t;
    g_prev = g;
  }
  return kInf;
}

double cylinder_hit(const Obstacle & ob, const Point3 & o, const Point3 & d)
{
  const double top = ob.base_z + ob.height;
  double best = kInf;
  const double ox = o.x() - ob.cx;
  const double oy = o.y() - ob.cy;
  const double a = d.x() * d.x() + d.y() * d.y();
  if (a > 0.0) {
    const double b = 2.0 * (ox * d.x() + oy * d.y());
    const double c = ox * ox + oy * oy - ob.radius * ob.radius;
    const double disc = b * b - 4.0 * a * c;
    if (disc >= 0.0) {
      const double t = (-b - std::sqrt(disc)) / (2.0 * a);
      const double z = o.z() + t * d.z();
      if (t > 0.0 && z >= ob.base_z && z <= top) {
        best = t;
      }
    }
  }
  if (d.z() != 0.0) {
    const double t = (top - o.z()) / d.z();
    const double x = ox + t * d.x();
    const double y = oy + t * d.y();
    if (t > 0.0 && x * x + y * y <= ob.radius * ob.radius) {
      best = std::min(best, t);
    }
  }
  return best;
}

double box_hit(const Obstacle & ob, const Point3 & o, const Point3 & d)
{
  const double c = std::cos(ob.yaw);
  const double s = std::sin(ob.yaw);
  const double px = c * (o.x() - ob.cx) + s * (o.y() - ob.cy);
  const double py = -s * (o.x() - ob.cx) + c * (o.y() - ob.cy);
  const double dx = c * d.x() + s * d.y();
  const double dy = -s * d.x() + c * d.y();
  const double lo[3] = {-ob.half_x, -ob.half_y, ob.base_z};
  const double hi[3] = {ob.half_x, ob.half_y, ob.base_z + ob.height};
  const double po[3] = {px, py, o.z()};
  const double pd[3] = {dx, dy, d.z()};
  double t_in = -kInf;
  double t_out = kInf;
  for (int k = 0; k < 3; ++k) {
    if (pd[k] == 0.0) {
      if (po[k] < lo[k] || po[k] > hi[k]) {
        return kInf;
      }
      continue;
    }
    double t0 = (lo[k] - po[k]) / pd[k];
    double t1 = (hi[k] - po[k]) / pd[k];
    if (t0 > t1) {
      std::swap(t0, t1);
    }
    t_in = std::max(t_in, t0);
    t_out = std::min(t_out, t1);
  }
  return (t_in <= t_out && t_in > 0.0) ? t_in : kInf;
}

}  // namespace

std::optional<RayHit> cast_ray(const WorldModel & world, const Point3 & origin, const Point3 & direction,
  double max_range)
{
  double best = terrain_hit(world, origin, direction, max_range);
  const Obstacle * hit_obstacle = nullptr;
  for (const auto & ob : world.obstacles) {
    const double t = ob.shape == Shape::cylinder ? cylinder_hit(ob, origin, direction) : box_hit(ob, origin, direction);
    if (t < best) {
      best = t;
      hit_obstacle = &ob;
    }
  }
  if (!(best <= max_range)) {
    return std::nullopt;
  }
  RayHit hit;
  hit.range = best;
  hit.point = origin + direction * best;
  hit.label = hit_obstacle ? hit_obstacle->label : world.class_at(hit.point.x(), hit.point.y());
  return hit;
}

RigidTransform CameraMount::camera_to_base() const
{
  Eigen::Matrix3d axes;
  // Columns: camera x (right), y (down), z (forward) in base coordinates.
  axes << 0.0, 0.0, 1.0,
    -1.0, 0.0, 0.0,
    0.0, -1.0, 0.0;
  const RigidTransform tilt = RigidTransform::from_axis_angle(Eigen::Vector3d::UnitY(), pitch);
  return RigidTransform::from_translation({0.0, 0.0, height}) * tilt * RigidTransform(axes, Eigen::Vector3d::Zero());
}

std::vector<double> ScanPattern::uniform_rings(double lo, double hi, std::size_t count)
{
  std::vector<double> out;
  for (std::size_t i = 0; i < count; ++i) {
    out.push_back(count == 1 ? lo : lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(count - 1));
  }
  return out;
}

SensorFrame render_frame(const WorldModel & world, const RigidTransform & true_base,
  const RigidTransform & reported_base, const CameraIntrinsics & intrinsics, const CameraMount & mount,
  double label_noise, Rng & rng, double timestamp)
{
  intrinsics.validate();
  const RigidTransform cam_to_base = mount.camera_to_base();
  const RigidTransform cam = true_base * cam_to_base;
  const double max_range = 4.0 * RangeHeightLimits{}.max_range;

  SensorFrame frame;
  frame.depth = Raster<float>(intrinsics.width, intrinsics.height, std::numeric_limits<float>::quiet_NaN());
  frame.labels = Raster<SemanticClass>(intrinsics.width, intrinsics.height, SemanticClass::unlabeled);
  frame.pose = reported_base * cam_to_base;
  frame.timestamp = timestamp;

  for (int v = 0; v < intrinsics.height; ++v) {
    for (int u = 0; u < intrinsics.width; ++u) {
      const Point3 ray((u - intrinsics.cx) / intrinsics.fx, (v - intrinsics.cy) / intrinsics.fy, 1.0);
      const double n = ray.norm();
      const Point3 dir = cam.rotation() * (ray / n);
      const auto hit = cast_ray(world, cam.translation(), dir, max_range);
      if (!hit) {
        continue;
      }
      frame.depth.at(u, v) = static_cast<float>(hit->range / n);
      SemanticClass label = hit->label;
      if (uniform01(rng) < label_noise) {
        // Uniform over the other labelled classes.
        auto pick = static_cast<std::size_t>(uniform01(rng) * (kNumLabeledClasses - 1));
        if (ordinal(label) < kNumLabeledClasses && pick >= ordinal(label)) {
          ++pick;
        }
        label = kLabeledClasses[std::min(pick, kNumLabeledClasses - 1)];
      }
      frame.labels.at(u, v) = label;
    }
  }
  return frame;
}

PointCloud render_scan(const WorldModel & world, const RigidTransform & true_base, const ScanPattern & pattern,
  Rng & rng)
{
  const RigidTransform sensor = true_base * pattern.sensor_to_base();
  std::vector<Point3> points;
  points.reserve(pattern.azimuth_count * pattern.elevations.size());
  for (double elevation : pattern.elevations) {
    for (std::size_t a = 0; a < pattern.azimuth_count; ++a) {
      const double az = 2.0 * M_PI * static_cast<double>(a) / static_cast<double>(pattern.azimuth_count);
      const Point3 local(std::cos(elevation) * std::cos(az), std::cos(elevation) * std::sin(az), std::sin(elevation));
      const auto hit = cast_ray(world, sensor.translation(), sensor.rotation() * local, pattern.max_range);
      if (!hit) {
        continue;
      }
      double range = hit->range;
      if (pattern.range_noise > 0.0) {
        range += pattern.range_noise * normal01(rng);
      }
      points.push_back(local * range);
    }
  }
  return PointCloud(std::move(points), Frame::sensor);
}

}  // namespace trailnav::sim
