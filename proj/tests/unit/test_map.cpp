#include "doctest.h"

#include <cmath>
#include <filesystem>

#include "oracles.hpp"
#include "trailnav/error.hpp"
#include "trailnav/traversability_map.hpp"

using namespace trailnav;

namespace
{

FusedCloud random_fused(Rng & rng, std::size_t n, double extent)
{
  FusedCloud c;
  c.frame = Frame::sensor;
  for (std::size_t i = 0; i < n; ++i) {
    c.points.emplace_back(uniform(rng, -extent, extent), uniform(rng, -extent, extent), uniform(rng, -0.2, 0.2));
    c.traversability.push_back(uniform01(rng));
    c.labels.push_back(uniform01(rng) < 0.5 ? SemanticClass::grass : SemanticClass::trail);
  }
  return c;
}

// Sequential greedy merge by linear scan.
void oracle_insert(TraversabilityMap & m, const Point3 & p, double t, SemanticClass label, double r)
{
  std::size_t best = m.size();
  double best_d2 = r * r;
  for (std::size_t i = 0; i < m.size(); ++i) {
    const double d2 = oracle::dist2(m.points[i], p);
    if (d2 <= r * r && (best == m.size() || d2 < best_d2)) {
      best = i;
      best_d2 = d2;
    }
  }
  if (best == m.size()) {
    m.points.push_back(p);
    m.traversability.push_back(t);
    m.labels.push_back(label);
  } else if (t < m.traversability[best]) {
    m.traversability[best] = t;
    m.labels[best] = label;
  }
}

IntegrationParams odometry_only()
{
  IntegrationParams p;
  p.use_icp = false;
  return p;
}

}  // namespace

TEST_CASE("the first frame lands at the odometry guess")
{
  Rng rng(1);
  const auto cloud = random_fused(rng, 100, 3.0);
  const auto pose = RigidTransform::from_yaw(0.4, {2, 1, 0});
  MapBuilder b;
  const auto report = b.integrate(cloud, pose);
  CHECK_FALSE(report.registered);
  CHECK(report.revision == 1);
  TraversabilityMap expect;
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    oracle_insert(expect, pose.apply(cloud.points[i]), cloud.traversability[i], cloud.labels[i], 0.1);
  }
  CHECK(b.current().points == expect.points);
  CHECK(b.current().traversability == expect.traversability);
}

TEST_CASE("integrating the same frame twice adds nothing")
{
  Rng rng(2);
  const auto cloud = random_fused(rng, 300, 3.0);
  MapBuilder b(odometry_only());
  b.integrate(cloud, RigidTransform::identity());
  const std::size_t n = b.current().size();
  const auto report = b.integrate(cloud, RigidTransform::identity());
  CHECK(b.current().size() == n);
  CHECK(report.appended == 0);
  CHECK(report.merged == cloud.size());
}

TEST_CASE("overlapping frames match the merge oracle")
{
  Rng rng(3);
  for (int trial = 0; trial < 5; ++trial) {
    const auto a = random_fused(rng, 400, 2.0);
    const auto c = random_fused(rng, 400, 2.0);
    const auto pose_a = RigidTransform::identity();
    const auto pose_c = RigidTransform::from_translation({1.0, 0.0, 0.0});
    MapBuilder b(odometry_only());
    b.integrate(a, pose_a);
    b.integrate(c, pose_c);

    TraversabilityMap expect;
    for (std::size_t i = 0; i < a.size(); ++i) {
      oracle_insert(expect, pose_a.apply(a.points[i]), a.traversability[i], a.labels[i], 0.1);
    }
    for (std::size_t i = 0; i < c.size(); ++i) {
      oracle_insert(expect, pose_c.apply(c.points[i]), c.traversability[i], c.labels[i], 0.1);
    }
    CHECK(b.current().points == expect.points);
    CHECK(b.current().traversability == expect.traversability);
    CHECK(b.current().labels == expect.labels);
  }
}

TEST_CASE("merged traversability never exceeds any contributing observation")
{
  Rng rng(4);
  MapBuilder b(odometry_only());
  std::vector<FusedCloud> frames;
  for (int f = 0; f < 4; ++f) {
    frames.push_back(random_fused(rng, 200, 1.0));
    b.integrate(frames.back(), RigidTransform::identity());
  }
  const auto & m = b.current();
  for (const auto & f : frames) {
    for (std::size_t i = 0; i < f.size(); ++i) {
      for (std::size_t j = 0; j < m.size(); ++j) {
        if (oracle::dist2(m.points[j], f.points[i]) == 0.0) {
          CHECK(m.traversability[j] <= f.traversability[i]);
        }
      }
    }
  }
}

TEST_CASE("snapshots never change after later integrations")
{
  Rng rng(5);
  MapBuilder b(odometry_only());
  b.integrate(random_fused(rng, 100, 2.0), RigidTransform::identity());
  const MapSnapshot first = b.snapshot();
  const auto copy = *first;
  CHECK(b.snapshot() == first);
  b.integrate(random_fused(rng, 100, 2.0), RigidTransform::identity());
  CHECK(first->points == copy.points);
  CHECK(first->traversability == copy.traversability);
  CHECK(b.snapshot()->revision == 2);
  CHECK(first->revision == 1);
}

TEST_CASE("registration corrects a displaced frame")
{
  // A bumpy patch seen twice; the second guess is off by 15 cm. Scattered
  // samples, since a regular grid would also align at whole-cell offsets.
  Rng rng(6);
  FusedCloud ground;
  for (int i = 0; i < 3000; ++i) {
    const double x = uniform(rng, -3, 3);
    const double y = uniform(rng, -3, 3);
    ground.points.emplace_back(x, y, 0.3 * std::sin(1.7 * x) * std::cos(1.3 * y) + 0.1 * x * y);
    ground.traversability.push_back(1.0);
    ground.labels.push_back(SemanticClass::grass);
  }
  MapBuilder b;
  b.integrate(ground, RigidTransform::identity());
  const auto report = b.integrate(ground, RigidTransform::from_translation({0.15, 0.0, 0.0}));
  REQUIRE(report.icp.has_value());
  CHECK(report.registered);
  CHECK(report.pose.translation().norm() < 0.01);
}

TEST_CASE("map validation, crop and file round trip")
{
  TraversabilityMap m;
  m.points = {Point3(0, 0, 0), Point3(5, 0, 1)};
  m.traversability = {0.25, 1.0};
  m.labels = {SemanticClass::grass, SemanticClass::trail};
  m.validate();

  const auto cropped = crop_map(m, Point3(0, 0, 100), 1.0);
  CHECK(cropped.size() == 1);

  const auto path = std::filesystem::temp_directory_path() / "trailnav_test_map.ply";
  write_map(path, m);
  const auto back = read_map(path);
  CHECK(back.points == m.points);
  CHECK(back.traversability == m.traversability);
  CHECK(back.labels == m.labels);
  std::filesystem::remove(path);

  auto bad = m;
  bad.traversability[0] = 1.5;
  CHECK_THROWS_AS(bad.validate(), DomainError);
  bad = m;
  bad.labels.pop_back();
  CHECK_THROWS_AS(bad.validate(), ShapeError);
  CHECK_THROWS_AS(MapBuilder(IntegrationParams{0.0}), DomainError);
}
