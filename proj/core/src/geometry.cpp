#include "trailnav/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include <Eigen/Geometry>

#include "trailnav/error.hpp"

namespace trailnav
{

namespace
{
constexpr double kRotationTolerance = 1e-9;
}

const char * frame_name(Frame frame)
{
  return frame == Frame::sensor ? "sensor" : "map";
}

bool is_finite(const Point3 & p)
{
  return std::isfinite(p.x()) && std::isfinite(p.y()) && std::isfinite(p.z());
}

RigidTransform::RigidTransform()
: rotation_(Eigen::Matrix3d::Identity()), translation_(Eigen::Vector3d::Zero())
{
}

RigidTransform::RigidTransform(const Eigen::Matrix3d & rotation, const Eigen::Vector3d & translation)
: rotation_(rotation), translation_(translation)
{
  if (!rotation.allFinite() || !translation.allFinite()) {
    throw DomainError("rigid transform has non-finite entries");
  }
  const double ortho_err = (rotation.transpose() * rotation - Eigen::Matrix3d::Identity()).cwiseAbs().maxCoeff();
  if (ortho_err > kRotationTolerance) {
    throw DomainError("rotation is not orthonormal (max |R^T R - I| = " + std::to_string(ortho_err) + ")");
  }
  if (std::abs(rotation.determinant() - 1.0) > kRotationTolerance) {
    throw DomainError("rotation determinant is not +1");
  }
}

RigidTransform::RigidTransform(const Eigen::Matrix3d & rotation, const Eigen::Vector3d & translation, Unchecked)
: rotation_(rotation), translation_(translation)
{
}

RigidTransform RigidTransform::from_translation(const Eigen::Vector3d & t)
{
  return RigidTransform(Eigen::Matrix3d::Identity(), t);
}

RigidTransform RigidTransform::from_yaw(double yaw, const Eigen::Vector3d & t)
{
  return RigidTransform(Eigen::AngleAxisd(yaw, Eigen::Vector3d::UnitZ()).toRotationMatrix(), t);
}

RigidTransform RigidTransform::from_axis_angle(const Eigen::Vector3d & axis, double angle, const Eigen::Vector3d & t)
{
  if (axis.norm() == 0.0) {
    throw DomainError("rotation axis must be non-zero");
  }
  return RigidTransform(Eigen::AngleAxisd(angle, axis.normalized()).toRotationMatrix(), t);
}

RigidTransform RigidTransform::inverse() const
{
  const Eigen::Matrix3d rt = rotation_.transpose();
  return RigidTransform(rt, -(rt * translation_), Unchecked{});
}

RigidTransform operator*(const RigidTransform & a, const RigidTransform & b)
{
  return RigidTransform(a.rotation_ * b.rotation_, a.rotation_ * b.translation_ + a.translation_,
           RigidTransform::Unchecked{});
}

double RigidTransform::yaw() const
{
  return std::atan2(rotation_(1, 0), rotation_(0, 0));
}

double RigidTransform::rotation_angle() const
{
  const double c = std::clamp((rotation_.trace() - 1.0) / 2.0, -1.0, 1.0);
  return std::acos(c);
}

PointCloud::PointCloud(std::vector<Point3> points, Frame frame)
: points_(std::move(points)), frame_(frame)
{
  require_finite(points_);
}

void require_finite(std::span<const Point3> points)
{
  for (std::size_t i = 0; i < points.size(); ++i) {
    if (!is_finite(points[i])) {
      throw NonFiniteInput("point " + std::to_string(i) + " has a non-finite coordinate");
    }
  }
}

std::vector<Point3> transform_points(const RigidTransform & transform, std::span<const Point3> points)
{
  std::vector<Point3> out;
  out.reserve(points.size());
  for (const auto & p : points) {
    out.push_back(transform.apply(p));
  }
  return out;
}

PointCloud transform_apply(const RigidTransform & transform, const PointCloud & cloud, Frame target)
{
  return PointCloud(transform_points(transform, cloud.points()), target);
}

}  // namespace trailnav
