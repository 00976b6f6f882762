#ifndef TRAILNAV_ICP_HPP
#define TRAILNAV_ICP_HPP

#include <cstddef>
#include <span>
#include <vector>

#include "trailnav/geometry.hpp"

namespace trailnav
{

class KdTree;

struct IcpParams
{
  std::size_t max_iterations = 30;
  /// Stop once an update moves the translation by less than this (meters)
  /// and the rotation by less than this (radians).
  double convergence_eps = 1e-6;
  /// Correspondences farther than this are rejected.
  double max_correspondence_distance = 1.0;
};

struct IcpResult
{
  /// Maps the newest cloud into the global cloud's frame: q ~ R p + t.
  RigidTransform transform;
  /// Mean squared correspondence distance at `transform` (meters^2).
  double residual = 0.0;
  std::size_t iterations = 0;
  std::size_t correspondences = 0;
  /// Residual at the initial guess followed by one entry per accepted
  /// iteration; non-increasing by construction.
  std::vector<double> residual_history;
};

/// Point-to-point ICP with a closed-form SVD (Kabsch) solve per iteration.
///
/// Finds the rigid motion that carries `newest` onto `global`, starting from
/// `initial_guess`. An iteration whose re-associated residual would rise is
/// rejected and ends the loop. Throws EmptyInput for empty clouds and
/// DegenerateGeometry when fewer than three correspondences survive or their
/// spread is rank deficient (collinear).
IcpResult icp_register(std::span<const Point3> newest, std::span<const Point3> global,
  const RigidTransform & initial_guess, const IcpParams & params = {});

/// Same, against a prebuilt index over the global cloud.
IcpResult icp_register(std::span<const Point3> newest, const KdTree & global,
  const RigidTransform & initial_guess, const IcpParams & params = {});

/// Least-squares rigid motion with dst ~ R src + t. Throws DegenerateGeometry.
RigidTransform kabsch(std::span<const Point3> src, std::span<const Point3> dst);

}  // namespace trailnav

#endif  // TRAILNAV_ICP_HPP
