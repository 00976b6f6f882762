#ifndef TRAILNAV_GEOMETRY_HPP
#define TRAILNAV_GEOMETRY_HPP

#include <cstddef>
#include <span>
#include <vector>

#include <Eigen/Core>

namespace trailnav
{

/// Position in meters. Which frame it lives in is carried by the owning cloud.
using Point3 = Eigen::Vector3d;

enum class Frame { sensor, map };

const char * frame_name(Frame frame);

bool is_finite(const Point3 & p);

/// Proper rigid motion p -> R p + t.
///
/// Construction validates R (orthonormal, det +1, within 1e-9) so every live
/// instance is a member of SE(3).
class RigidTransform
{
public:
  RigidTransform();
  RigidTransform(const Eigen::Matrix3d & rotation, const Eigen::Vector3d & translation);

  static RigidTransform identity() {return {};}
  static RigidTransform from_translation(const Eigen::Vector3d & t);
  /// Rotation about +z by `yaw` radians followed by translation.
  static RigidTransform from_yaw(double yaw, const Eigen::Vector3d & t = Eigen::Vector3d::Zero());
  /// Rotation about a unit axis; the axis is normalized internally.
  static RigidTransform from_axis_angle(const Eigen::Vector3d & axis, double angle,
    const Eigen::Vector3d & t = Eigen::Vector3d::Zero());

  const Eigen::Matrix3d & rotation() const {return rotation_;}
  const Eigen::Vector3d & translation() const {return translation_;}

  Point3 apply(const Point3 & p) const {return rotation_ * p + translation_;}
  RigidTransform inverse() const;

  /// (a * b).apply(p) == a.apply(b.apply(p))
  friend RigidTransform operator*(const RigidTransform & a, const RigidTransform & b);

  /// Yaw of the rotated x axis projected on the ground plane.
  double yaw() const;
  /// Rotation angle of R in radians, in [0, pi].
  double rotation_angle() const;

private:
  struct Unchecked {};
  RigidTransform(const Eigen::Matrix3d & rotation, const Eigen::Vector3d & translation, Unchecked);

  Eigen::Matrix3d rotation_;
  Eigen::Vector3d translation_;
};

/// Immutable set of finite points tagged with the frame they are expressed in.
class PointCloud
{
public:
  explicit PointCloud(Frame frame = Frame::map) : frame_(frame) {}
  /// Throws NonFiniteInput if any coordinate is NaN or Inf.
  PointCloud(std::vector<Point3> points, Frame frame);

  Frame frame() const {return frame_;}
  std::size_t size() const {return points_.size();}
  bool empty() const {return points_.empty();}
  const Point3 & operator[](std::size_t i) const {return points_[i];}
  std::span<const Point3> points() const {return points_;}

  auto begin() const {return points_.begin();}
  auto end() const {return points_.end();}

private:
  std::vector<Point3> points_;
  Frame frame_;
};

/// Throws NonFiniteInput on the first non-finite point.
void require_finite(std::span<const Point3> points);

PointCloud transform_apply(const RigidTransform & transform, const PointCloud & cloud,
  Frame target = Frame::map);

std::vector<Point3> transform_points(const RigidTransform & transform, std::span<const Point3> points);

}  // namespace trailnav

#endif  // TRAILNAV_GEOMETRY_HPP
