#include "doctest.h"

#include <cmath>
#include <memory>

#include "oracles.hpp"
#include "trailnav/error.hpp"
#include "trailnav/planner.hpp"

using namespace trailnav;

namespace
{

template<typename F>
MapSnapshot grid_map(double sx, double sy, F t_of)
{
  auto m = std::make_shared<TraversabilityMap>();
  for (int i = 0; i <= static_cast<int>(std::round(sx / 0.1)); ++i) {
    for (int j = 0; j <= static_cast<int>(std::round(sy / 0.1)); ++j) {
      const Point3 p(0.1 * i, 0.1 * j, 0.0);
      m->points.push_back(p);
      m->traversability.push_back(t_of(p));
      m->labels.push_back(SemanticClass::grass);
    }
  }
  return m;
}

PlanConfig quick(double w, std::uint64_t seed, std::size_t iterations = 1500)
{
  PlanConfig c;
  c.traversability_weight = w;
  c.rng_seed = seed;
  c.max_iterations = iterations;
  return c;
}

}  // namespace

TEST_CASE("edge cost examples")
{
  CHECK(edge_cost(1.0, 1.0, 2.0, 5.0) == 2.0);
  CHECK(edge_cost(0.5, 0.5, 0.0, 1.0) == 2.0);
  CHECK(edge_cost(1.0, 0.6, 1.0, 2.0) == doctest::Approx(3.5));
  CHECK_THROWS_AS(edge_cost(1.0, 0.0, 1.0, 1.0), CollisionSpace);
  CHECK_THROWS_AS(edge_cost(0.0, 1.0, 1.0, 1.0), CollisionSpace);
}

TEST_CASE("edge cost agrees with independent recomputation")
{
  Rng rng(1);
  for (int i = 0; i < 200; ++i) {
    const double tp = i % 5 == 0 ? 1.0 : uniform(rng, 1e-3, 1.0);
    const double tc = i % 5 == 0 || i % 7 == 0 ? 1.0 : uniform(rng, 1e-3, 1.0);
    const Point3 a(uniform(rng, -5, 5), uniform(rng, -5, 5), uniform(rng, -1, 1));
    const Point3 b(uniform(rng, -5, 5), uniform(rng, -5, 5), uniform(rng, -1, 1));
    const double w = uniform(rng, 0.0, 10.0);
    TreeNode parent{a, -1, 0.0, tp};
    const double expect = oracle::path_cost({a, b}, {tp, tc}, w);
    CHECK(std::abs(edge_cost(parent, b, tc, w) - expect) <= 1e-12);
  }
}

TEST_CASE("sampling follows the traversability distribution")
{
  auto one = std::make_shared<TraversabilityMap>();
  one->points = {Point3(0, 0, 0), Point3(1, 0, 0), Point3(2, 0, 0)};
  one->traversability = {0.0, 1.0, 0.0};
  one->labels.assign(3, SemanticClass::grass);
  const TraversabilitySampler degenerate(one);
  Rng rng(2);
  for (int i = 0; i < 1000; ++i) {
    CHECK(degenerate.sample_index(rng) == 1);
  }

  auto two = std::make_shared<TraversabilityMap>();
  two->points = {Point3(0, 0, 0), Point3(1, 0, 0)};
  two->traversability = {0.8, 0.2};
  two->labels.assign(2, SemanticClass::grass);
  const TraversabilitySampler sampler(two);
  std::size_t first = 0;
  const int draws = 100000;
  for (int i = 0; i < draws; ++i) {
    first += sampler.sample_index(rng) == 0;
  }
  CHECK(std::abs(static_cast<double>(first) / draws - 0.8) <= 0.02);

  Rng a(9);
  Rng b(9);
  for (int i = 0; i < 100; ++i) {
    CHECK(sample_candidate(sampler, Point3(5, 5, 5), 0.3, a) == sample_candidate(sampler, Point3(5, 5, 5), 0.3, b));
  }

  auto zero = std::make_shared<TraversabilityMap>(*two);
  zero->traversability = {0.0, 0.0};
  CHECK_THROWS_AS(TraversabilitySampler{zero}, NoTraversableSpace);
}

TEST_CASE("start at the goal")
{
  const auto map = grid_map(4, 4, [](const Point3 &) {return 1.0;});
  const auto r = plan(map, Point3(1, 1, 0), Point3(1, 1, 0), quick(5.0, 0));
  CHECK(r.success);
  REQUIRE(r.waypoints.size() == 1);
  CHECK(r.total_cost == 0.0);
}

TEST_CASE("tree invariants on a mixed map")
{
  // Low traversability on the right half, a collision strip in the middle
  // with a gap at the top.
  const auto map = grid_map(10, 4, [](const Point3 & p) {
      if (p.x() > 4.75 && p.x() < 5.25 && p.y() < 3.0) {
        return 0.0;
      }
      return p.x() < 5.0 ? 1.0 : 0.6;
    });
  const PlanConfig config = quick(5.0, 3, 3000);
  const TraversabilityField field(map, config.interp_radius, config.clearance);
  const Point3 start(1, 1, 0);
  const Point3 goal(9, 1, 0);
  const auto r = plan(map, start, goal, config);
  REQUIRE(r.success);

  for (std::size_t i = 0; i < r.tree.size(); ++i) {
    const auto & n = r.tree[i];
    CHECK(n.traversability > 0.0);
    CHECK(field.at(n.position) == n.traversability);
    if (n.parent < 0) {
      CHECK(n.cost == 0.0);
      continue;
    }
    const auto & p = r.tree[static_cast<std::size_t>(n.parent)];
    CHECK(n.cost >= p.cost);
    CHECK(n.cost == doctest::Approx(p.cost + edge_cost(p, n.position, n.traversability, 5.0)).epsilon(1e-12));
    CHECK((n.position - p.position).norm() <= config.neighbor_radius + 1e-9);
  }

  // No node can be improved by re-parenting to a reachable neighbor. Pairs on
  // the radius itself are ambiguous under rounding and are skipped.
  for (std::size_t i = 1; i < r.tree.size(); ++i) {
    const auto & n = r.tree[i];
    for (std::size_t j = 0; j < r.tree.size(); ++j) {
      const auto & m = r.tree[j];
      if (j == i || (m.position - n.position).norm() > config.neighbor_radius - 1e-9) {
        continue;
      }
      if (!field.segment_free(m.position, n.position, config.edge_resolution)) {
        continue;
      }
      CHECK(m.cost + edge_cost(m, n.position, n.traversability, 5.0) >= n.cost - 1e-9);
    }
  }

  CHECK(r.waypoints.front().position == start);
  CHECK((r.waypoints.back().position - goal).norm() <= config.goal_tolerance);
  for (std::size_t i = 1; i < r.waypoints.size(); ++i) {
    CHECK((r.waypoints[i].position - r.waypoints[i - 1].position).norm() <= config.step_size + 1e-9);
    CHECK(field.at(r.waypoints[i].position) > 0.0);
  }
  CHECK(path_cost(r.tree, r.node_path, 5.0) == doctest::Approx(r.total_cost).epsilon(1e-12));
}

TEST_CASE("with zero weight the cost is path length")
{
  const auto map = grid_map(8, 4, [](const Point3 & p) {return p.y() < 2.0 ? 0.3 : 1.0;});
  const auto r = plan(map, Point3(0.5, 0.5, 0), Point3(7.5, 3.5, 0), quick(0.0, 4));
  REQUIRE(r.success);
  double length = 0.0;
  for (std::size_t i = 1; i < r.node_path.size(); ++i) {
    length += (r.tree[r.node_path[i]].position - r.tree[r.node_path[i - 1]].position).norm();
  }
  CHECK(r.total_cost == doctest::Approx(length).epsilon(1e-12));
}

TEST_CASE("fixed seed gives an identical plan")
{
  const auto map = grid_map(8, 4, [](const Point3 & p) {return p.y() < 2.0 ? 0.5 : 1.0;});
  const auto a = plan(map, Point3(0.5, 0.5, 0), Point3(7.5, 3.5, 0), quick(5.0, 6));
  const auto b = plan(map, Point3(0.5, 0.5, 0), Point3(7.5, 3.5, 0), quick(5.0, 6));
  REQUIRE(a.tree.size() == b.tree.size());
  for (std::size_t i = 0; i < a.tree.size(); ++i) {
    CHECK(a.tree[i].position == b.tree[i].position);
    CHECK(a.tree[i].parent == b.tree[i].parent);
    CHECK(a.tree[i].cost == b.tree[i].cost);
  }
  CHECK(a.total_cost == b.total_cost);
}

TEST_CASE("clearance keeps nodes away from collision points")
{
  const auto map = grid_map(8, 4, [](const Point3 & p) {
      return std::abs(p.x() - 4.0) < 0.05 && std::abs(p.y() - 2.0) < 0.05 ? 0.0 : 1.0;
    });
  PlanConfig config = quick(5.0, 7, 2000);
  config.clearance = 0.5;
  const auto r = plan(map, Point3(0.5, 2, 0), Point3(7.5, 2, 0), config);
  REQUIRE(r.success);
  for (const auto & n : r.tree) {
    CHECK(std::hypot(n.position.x() - 4.0, n.position.y() - 2.0) >= 0.5);
  }
}

TEST_CASE("planning errors")
{
  const auto map = grid_map(4, 4, [](const Point3 & p) {return p.x() < 1.0 ? 0.0 : 1.0;});
  CHECK_THROWS_AS(plan(map, Point3(0.5, 0.5, 0), Point3(3, 3, 0), quick(5.0, 0)), NoTraversableSpace);
  CHECK_THROWS_AS(plan(map, Point3(10, 10, 0), Point3(3, 3, 0), quick(5.0, 0)), NoTraversableSpace);
  CHECK_THROWS_AS(plan(std::make_shared<TraversabilityMap>(), Point3::Zero(), Point3::Zero(), quick(5.0, 0)),
    NoTraversableSpace);
  PlanConfig bad = quick(5.0, 0);
  bad.step_size = 0.0;
  CHECK_THROWS_AS(bad.validate(), ParamError);
  bad = quick(5.0, 0);
  bad.goal_bias = 1.5;
  CHECK_THROWS_AS(bad.validate(), ParamError);

  // An unreachable goal keeps the tree.
  const auto island = grid_map(4, 4, [](const Point3 & p) {return p.x() < 2.0 ? 1.0 : 0.0;});
  const auto r = plan(island, Point3(0.5, 0.5, 0), Point3(3.5, 3.5, 0), quick(5.0, 0, 300));
  CHECK_FALSE(r.success);
  CHECK(r.tree.size() > 1);
  CHECK(r.iterations == 300);
}

TEST_CASE("next waypoint along a straight path")
{
  std::vector<Waypoint> path;
  for (int i = 0; i <= 10; ++i) {
    path.push_back({Point3(0.5 * i, 0, 0), 0.5 * i});
  }
  // Two meters ahead of the start is the fourth waypoint after it.
  CHECK(next_waypoint(path, Point3(0, 0, 0), 2.0, 3.0) == Point3(2.0, 0, 0));
  CHECK(next_waypoint(path, Point3(4.9, 0.1, 0), 2.0, 3.0) == Point3(5.0, 0, 0));
  CHECK(next_waypoint(path, Point3(1.2, 0.5, 0), 1.0, 3.0) == Point3(2.5, 0, 0));
  CHECK_THROWS_AS(next_waypoint(path, Point3(2, 10, 0), 2.0, 3.0), ReplanRequired);
  CHECK_THROWS_AS(next_waypoint(std::vector<Waypoint>{}, Point3(0, 0, 0), 2.0, 3.0), InputError);
}

TEST_CASE("waypoint extraction subdivides long edges")
{
  std::vector<TreeNode> tree = {{Point3(0, 0, 0), -1, 0.0, 1.0}, {Point3(2, 0, 0), 0, 2.0, 1.0},
    {Point3(2, 1, 0), 1, 3.0, 1.0}};
  std::vector<std::size_t> node_path;
  const auto w = extract_waypoints(tree, 2, 0.5, &node_path);
  CHECK(node_path == std::vector<std::size_t>{0, 1, 2});
  REQUIRE(w.size() == 7);
  CHECK(w[2].position == Point3(1, 0, 0));
  CHECK(w[2].cost == doctest::Approx(1.0));
  CHECK(w.back().cost == 3.0);
}

TEST_CASE("frontier node choice")
{
  std::vector<TreeNode> tree = {{Point3(0, 0, 0), -1, 0.0, 1.0}, {Point3(1, 0, 0), 0, 1.0, 1.0},
    {Point3(0.5, 0, 0), 0, 0.5, 1.0}, {Point3(3, 0, 0), 1, 10.0, 0.5}};
  const Point3 goal(10, 0, 0);
  CHECK(best_frontier_node(tree, goal, 2.0) == 1);
  CHECK(best_frontier_node(tree, goal, 5.0) == 3);
  // The nearby node is skipped when a minimum distance is asked for.
  std::vector<TreeNode> near = {{Point3(0, 0, 0), -1, 0.0, 1.0}, {Point3(0.5, 0, 0), 0, 0.5, 1.0},
    {Point3(1.2, 0, 0), 0, 5.0, 1.0}};
  CHECK(best_frontier_node(near, goal, 2.0) == 1);
  CHECK(best_frontier_node(near, goal, 2.0, 1.0) == 2);
}

TEST_CASE("plan exports")
{
  const auto map = grid_map(4, 4, [](const Point3 &) {return 1.0;});
  const auto r = plan(map, Point3(0.5, 0.5, 0), Point3(3.5, 3.5, 0), quick(5.0, 1, 500));
  REQUIRE(r.success);
  const auto dir = std::filesystem::temp_directory_path();
  write_waypoints_csv(dir / "trailnav_test_wp.csv", r.waypoints);
  write_tree_csv(dir / "trailnav_test_tree.csv", r.tree);
  CHECK(std::filesystem::file_size(dir / "trailnav_test_wp.csv") > 0);
  CHECK(std::filesystem::file_size(dir / "trailnav_test_tree.csv") > 0);
  std::filesystem::remove(dir / "trailnav_test_wp.csv");
  std::filesystem::remove(dir / "trailnav_test_tree.csv");
}
