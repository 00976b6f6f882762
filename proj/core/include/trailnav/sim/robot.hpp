#ifndef TRAILNAV_SIM_ROBOT_HPP
#define TRAILNAV_SIM_ROBOT_HPP

#include <cstdint>
#include <vector>

#include "trailnav/geometry.hpp"
#include "trailnav/random.hpp"
#include "trailnav/sim/world.hpp"

namespace trailnav::sim
{

struct Pose2
{
  double x = 0.0;
  double y = 0.0;
  double yaw = 0.0;
};

struct OdometryNoise
{
  /// Standard deviations per meter driven.
  double sigma_translation = 0.0;
  double sigma_rotation = 0.0;
};

/// Ground-truth pose plus the robot's own odometry estimate. Both poses sit
/// on the ground: z always follows the heightfield under the true position.
struct RobotState
{
  Pose2 truth;
  Pose2 odometry;
  double z = 0.0;
  double nominal_speed = 1.5;
  double clock = 0.0;
  OdometryNoise noise;
  Rng rng{0};
  /// Steps whose motion was stopped by an impassable cell.
  std::size_t blocked_steps = 0;

  RigidTransform pose() const {return RigidTransform::from_yaw(truth.yaw, {truth.x, truth.y, z});}
  RigidTransform odometry_pose() const {return RigidTransform::from_yaw(odometry.yaw, {odometry.x, odometry.y, z});}

  /// Replaces the odometry estimate, e.g. with a registration result.
  void correct_odometry(const RigidTransform & estimate);
};

/// Robot at `position` facing `yaw`, estimate equal to the truth.
RobotState make_robot(const WorldModel & world, const Point3 & position, double yaw, double nominal_speed,
  const OdometryNoise & noise, std::uint64_t seed);

/// Pure pursuit of one step. The robot turns toward `target` as seen from its
/// odometry estimate and drives min(distance, nominal_speed * factor * dt),
/// where factor is the class speed factor under its true position. A step
/// that would end on an impassable cell leaves the robot in place and bumps
/// blocked_steps. Odometry accumulates zero-mean Gaussian noise scaled by the
/// distance driven.
///
/// Throws DomainError for dt <= 0, RefusedWaypoint if `target` lies on an
/// impassable cell.
RobotState step_robot(const WorldModel & world, const RobotState & robot, const Point3 & target, double dt);
/// In-place form; same contract.
void advance_robot(const WorldModel & world, RobotState & robot, const Point3 & target, double dt);

}  // namespace trailnav::sim

#endif  // TRAILNAV_SIM_ROBOT_HPP
