#include "trailnav/icp.hpp"

#include <cmath>

#include <Eigen/LU>
#include <Eigen/SVD>

#include "trailnav/error.hpp"
#include "trailnav/kdtree.hpp"

namespace trailnav
{

RigidTransform kabsch(std::span<const Point3> src, std::span<const Point3> dst)
{
  if (src.size() != dst.size()) {
    throw ShapeError("kabsch needs equally sized point sets");
  }
  if (src.size() < 3) {
    throw DegenerateGeometry("need at least three correspondences");
  }
  Point3 src_mean = Point3::Zero();
  Point3 dst_mean = Point3::Zero();
  for (std::size_t i = 0; i < src.size(); ++i) {
    src_mean += src[i];
    dst_mean += dst[i];
  }
  src_mean /= static_cast<double>(src.size());
  dst_mean /= static_cast<double>(dst.size());

  Eigen::Matrix3d h = Eigen::Matrix3d::Zero();
  for (std::size_t i = 0; i < src.size(); ++i) {
    h += (src[i] - src_mean) * (dst[i] - dst_mean).transpose();
  }
  Eigen::JacobiSVD<Eigen::Matrix3d> svd(h, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const Eigen::Vector3d sv = svd.singularValues();
  if (!(sv[0] > 0.0) || sv[1] <= 1e-12 * sv[0]) {
    throw DegenerateGeometry("correspondence covariance is rank deficient");
  }
  const Eigen::Matrix3d u = svd.matrixU();
  const Eigen::Matrix3d v = svd.matrixV();
  Eigen::Matrix3d d = Eigen::Matrix3d::Identity();
  d(2, 2) = (v * u.transpose()).determinant() < 0.0 ? -1.0 : 1.0;
  const Eigen::Matrix3d r = v * d * u.transpose();
  return RigidTransform(r, dst_mean - r * src_mean);
}

namespace
{

struct Matches
{
  std::vector<Point3> src;
  std::vector<Point3> dst;
  double residual = 0.0;
};

Matches match(std::span<const Point3> newest, const KdTree & global, const RigidTransform & t, double max_dist)
{
  Matches m;
  m.src.reserve(newest.size());
  m.dst.reserve(newest.size());
  double sum = 0.0;
  for (const auto & p : newest) {
    const Point3 moved = t.apply(p);
    const Neighbor nn = global.nearest(moved);
    if (nn.distance > max_dist) {
      continue;
    }
    m.src.push_back(p);
    m.dst.push_back(global.point(nn.index));
    sum += KdTree::squared_distance(moved, global.point(nn.index));
  }
  if (m.src.size() < 3) {
    throw DegenerateGeometry("fewer than three ICP correspondences within the rejection distance");
  }
  m.residual = sum / static_cast<double>(m.src.size());
  return m;
}

}  // namespace

IcpResult icp_register(std::span<const Point3> newest, const KdTree & global,
  const RigidTransform & initial_guess, const IcpParams & params)
{
  if (newest.empty()) {
    throw EmptyInput("ICP needs a non-empty newest cloud");
  }
  IcpResult result;
  result.transform = initial_guess;
  Matches current = match(newest, global, initial_guess, params.max_correspondence_distance);
  result.residual = current.residual;
  result.correspondences = current.src.size();
  result.residual_history.push_back(current.residual);

  for (std::size_t iter = 0; iter < params.max_iterations; ++iter) {
    const RigidTransform candidate = kabsch(current.src, current.dst);
    Matches next = match(newest, global, candidate, params.max_correspondence_distance);
    if (next.residual > current.residual) {
      break;
    }
    const RigidTransform delta = candidate * result.transform.inverse();
    result.transform = candidate;
    result.residual = next.residual;
    result.correspondences = next.src.size();
    result.residual_history.push_back(next.residual);
    result.iterations = iter + 1;
    current = std::move(next);
    if (delta.translation().norm() < params.convergence_eps && delta.rotation_angle() < params.convergence_eps) {
      break;
    }
  }
  return result;
}

IcpResult icp_register(std::span<const Point3> newest, std::span<const Point3> global,
  const RigidTransform & initial_guess, const IcpParams & params)
{
  if (global.empty()) {
    throw EmptyInput("ICP needs a non-empty global cloud");
  }
  const KdTree tree(global);
  return icp_register(newest, tree, initial_guess, params);
}

}  // namespace trailnav
