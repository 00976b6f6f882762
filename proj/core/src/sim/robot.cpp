#include "trailnav/sim/robot.hpp"

#include <algorithm>
#include <cmath>

#include "trailnav/error.hpp"

namespace trailnav::sim
{

void RobotState::correct_odometry(const RigidTransform & estimate)
{
  odometry.x = estimate.translation().x();
  odometry.y = estimate.translation().y();
  odometry.yaw = estimate.yaw();
}

RobotState make_robot(const WorldModel & world, const Point3 & position, double yaw, double nominal_speed,
  const OdometryNoise & noise, std::uint64_t seed)
{
  if (!(nominal_speed >= 0.0)) {
    throw DomainError("speed must be non-negative");
  }
  RobotState r;
  r.truth = {position.x(), position.y(), yaw};
  r.odometry = r.truth;
  r.z = world.height_at(position.x(), position.y());
  r.nominal_speed = nominal_speed;
  r.noise = noise;
  r.rng.seed(seed);
  return r;
}

void advance_robot(const WorldModel & world, RobotState & robot, const Point3 & target, double dt)
{
  if (!(dt > 0.0)) {
    throw DomainError("dt must be positive");
  }
  if (world.impassable_at(target.x(), target.y())) {
    throw RefusedWaypoint("waypoint lies on an impassable cell");
  }
  robot.clock += dt;

  const double ex = target.x() - robot.odometry.x;
  const double ey = target.y() - robot.odometry.y;
  const double remaining = std::hypot(ex, ey);
  if (remaining == 0.0) {
    return;
  }
  const double heading = std::atan2(ey, ex);
  const double yaw_error = robot.truth.yaw - robot.odometry.yaw;
  const double factor = class_speed_factor(world.class_at(robot.truth.x, robot.truth.y));
  const double d = std::min(remaining, robot.nominal_speed * factor * dt);

  const double true_yaw = heading + yaw_error;
  const double nx = robot.truth.x + d * std::cos(true_yaw);
  const double ny = robot.truth.y + d * std::sin(true_yaw);
  robot.truth.yaw = true_yaw;
  robot.odometry.yaw = heading;
  if (d == 0.0 || world.impassable_at(nx, ny)) {
    ++robot.blocked_steps;
    return;
  }
  robot.truth.x = nx;
  robot.truth.y = ny;
  robot.z = world.height_at(nx, ny);

  double d_est = d;
  if (robot.noise.sigma_translation > 0.0 || robot.noise.sigma_rotation > 0.0) {
    d_est += robot.noise.sigma_translation * d * normal01(robot.rng);
    robot.odometry.yaw += robot.noise.sigma_rotation * d * normal01(robot.rng);
  }
  // Same arithmetic as the truth update so noise-free odometry stays exact.
  robot.odometry.x += d_est * std::cos(heading);
  robot.odometry.y += d_est * std::sin(heading);
}

RobotState step_robot(const WorldModel & world, const RobotState & robot, const Point3 & target, double dt)
{
  RobotState next = robot;
  advance_robot(world, next, target, dt);
  return next;
}

}  // namespace trailnav::sim
