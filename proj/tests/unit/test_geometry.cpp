#include "doctest.h"

#include <cmath>

#include "trailnav/error.hpp"
#include "trailnav/geometry.hpp"
#include "trailnav/random.hpp"

using namespace trailnav;

namespace
{

RigidTransform random_transform(Rng & rng)
{
  const Eigen::Vector3d axis(normal01(rng), normal01(rng), normal01(rng));
  return RigidTransform::from_axis_angle(axis, uniform(rng, -M_PI, M_PI),
           {uniform(rng, -5, 5), uniform(rng, -5, 5), uniform(rng, -5, 5)});
}

}  // namespace

TEST_CASE("rigid transform rejects non-rotations")
{
  Eigen::Matrix3d reflect = Eigen::Matrix3d::Identity();
  reflect(2, 2) = -1.0;
  CHECK_THROWS_AS(RigidTransform(reflect, Eigen::Vector3d::Zero()), DomainError);
  CHECK_THROWS_AS(RigidTransform(2.0 * Eigen::Matrix3d::Identity(), Eigen::Vector3d::Zero()), DomainError);
  Eigen::Matrix3d nan = Eigen::Matrix3d::Identity();
  nan(0, 1) = std::nan("");
  CHECK_THROWS_AS(RigidTransform(nan, Eigen::Vector3d::Zero()), Error);
}

TEST_CASE("composition and inverse agree with pointwise application")
{
  Rng rng(11);
  for (int trial = 0; trial < 100; ++trial) {
    const auto a = random_transform(rng);
    const auto b = random_transform(rng);
    const Point3 p(uniform(rng, -3, 3), uniform(rng, -3, 3), uniform(rng, -3, 3));
    CHECK(((a * b).apply(p) - a.apply(b.apply(p))).norm() < 1e-12);
    CHECK((a.inverse().apply(a.apply(p)) - p).norm() < 1e-12);
  }
}

TEST_CASE("yaw and rotation angle")
{
  const auto t = RigidTransform::from_yaw(0.7, {1, 2, 3});
  CHECK(t.yaw() == doctest::Approx(0.7));
  CHECK(t.rotation_angle() == doctest::Approx(0.7));
  CHECK(RigidTransform::identity().rotation_angle() == 0.0);
  CHECK(RigidTransform::from_yaw(M_PI).rotation_angle() == doctest::Approx(M_PI));
}

TEST_CASE("point cloud refuses non-finite points")
{
  CHECK_THROWS_AS(PointCloud({Point3(0, 0, std::nan(""))}, Frame::map), NonFiniteInput);
  CHECK_THROWS_AS(PointCloud({Point3(INFINITY, 0, 0)}, Frame::map), NonFiniteInput);
  const PointCloud c({Point3(1, 2, 3)}, Frame::sensor);
  CHECK(c.frame() == Frame::sensor);
  const auto moved = transform_apply(RigidTransform::from_translation({1, 0, 0}), c);
  CHECK(moved.frame() == Frame::map);
  CHECK(moved[0].x() == 2.0);
}

TEST_CASE("frame names")
{
  CHECK(std::string(frame_name(Frame::map)) == "map");
  CHECK(std::string(frame_name(Frame::sensor)) == "sensor");
}

TEST_CASE("seed mixing gives distinct streams")
{
  CHECK(mix_seed(1, 2) != mix_seed(2, 1));
  CHECK(mix_seed(0, 0) != mix_seed(0, 1));
  Rng a(5);
  Rng b(5);
  for (int i = 0; i < 10; ++i) {
    CHECK(uniform01(a) == uniform01(b));
  }
}
