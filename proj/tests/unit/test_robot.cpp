#include "doctest.h"

#include <cmath>

#include "trailnav/error.hpp"
#include "trailnav/sim/robot.hpp"

using namespace trailnav;
using namespace trailnav::sim;

namespace
{

WorldModel strip_world()
{
  // 10 m x 2 m: grass, then vegetation from x = 5, trunk cells at x in [8, 8.2).
  WorldModel w;
  w.resolution = 0.1;
  w.nx = 100;
  w.ny = 20;
  w.heights.assign(static_cast<std::size_t>(w.nx + 1) * (w.ny + 1), 0.0);
  w.classes.assign(static_cast<std::size_t>(w.nx) * w.ny, SemanticClass::grass);
  w.hazard.assign(w.classes.size(), 0.0);
  for (int j = 0; j < w.ny; ++j) {
    for (int i = 50; i < w.nx; ++i) {
      w.classes[static_cast<std::size_t>(j) * w.nx + i] = i < 80 || i >= 82 ? SemanticClass::vegetation :
        SemanticClass::tree_trunk;
    }
  }
  w.finalize();
  return w;
}

}  // namespace

TEST_CASE("speed follows the class under the robot")
{
  const auto w = strip_world();
  auto r = make_robot(w, Point3(1, 1, 0), 0.0, 1.0, {}, 0);
  advance_robot(w, r, Point3(4, 1, 0), 0.5);
  CHECK(r.truth.x == doctest::Approx(1.0 + 0.75 * 0.5));
  CHECK(r.clock == 0.5);
  r = make_robot(w, Point3(6, 1, 0), 0.0, 1.0, {}, 0);
  advance_robot(w, r, Point3(7.5, 1, 0), 0.5);
  CHECK(r.truth.x == doctest::Approx(6.0 + 0.5 * 0.5));
}

TEST_CASE("the robot stops at the target")
{
  const auto w = strip_world();
  auto r = make_robot(w, Point3(1, 1, 0), 0.0, 1.0, {}, 0);
  for (int i = 0; i < 100; ++i) {
    advance_robot(w, r, Point3(2, 1.5, 0), 0.1);
  }
  CHECK(r.truth.x == doctest::Approx(2.0));
  CHECK(r.truth.y == doctest::Approx(1.5));
  CHECK(r.odometry.x == r.truth.x);
  CHECK(r.odometry.y == r.truth.y);
}

TEST_CASE("impassable cells block motion and refuse targets")
{
  const auto w = strip_world();
  auto r = make_robot(w, Point3(7.95, 1, 0), 0.0, 2.0, {}, 0);
  advance_robot(w, r, Point3(9.0, 1, 0), 0.1);
  CHECK(r.truth.x == 7.95);
  CHECK(r.blocked_steps == 1);
  CHECK_THROWS_AS(advance_robot(w, r, Point3(8.1, 1, 0), 0.1), RefusedWaypoint);
  CHECK_THROWS_AS(advance_robot(w, r, Point3(7, 1, 0), 0.0), DomainError);
}

TEST_CASE("odometry noise is reproducible and drifts")
{
  const auto w = strip_world();
  auto a = make_robot(w, Point3(1, 1, 0), 0.0, 1.0, {0.05, 0.02}, 3);
  auto b = make_robot(w, Point3(1, 1, 0), 0.0, 1.0, {0.05, 0.02}, 3);
  const auto c = step_robot(w, a, Point3(4, 1, 0), 0.1);
  for (int i = 0; i < 30; ++i) {
    advance_robot(w, a, Point3(4, 1, 0), 0.1);
    advance_robot(w, b, Point3(4, 1, 0), 0.1);
  }
  CHECK(a.odometry.x == b.odometry.x);
  CHECK(a.truth.y == b.truth.y);
  CHECK(std::hypot(a.odometry.x - a.truth.x, a.odometry.y - a.truth.y) > 0.0);
  CHECK(c.clock == doctest::Approx(0.1));
}

TEST_CASE("correcting odometry replaces the estimate")
{
  const auto w = strip_world();
  auto r = make_robot(w, Point3(1, 1, 0), 0.0, 1.0, {}, 0);
  r.correct_odometry(RigidTransform::from_yaw(0.5, {2, 1.5, 0}));
  CHECK(r.odometry.x == 2.0);
  CHECK(r.odometry.y == 1.5);
  CHECK(r.odometry.yaw == doctest::Approx(0.5));
  CHECK(r.truth.x == 1.0);
}
