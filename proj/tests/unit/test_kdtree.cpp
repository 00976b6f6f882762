#include "doctest.h"

#include <cmath>

#include "oracles.hpp"
#include "trailnav/error.hpp"
#include "trailnav/kdtree.hpp"

using namespace trailnav;

TEST_CASE("kd-tree queries match linear scans")
{
  Rng rng(3);
  for (int instance = 0; instance < 20; ++instance) {
    const std::size_t n = 1 + static_cast<std::size_t>(uniform01(rng) * 500);
    const auto pts = oracle::random_cloud(rng, n);
    const KdTree tree(pts);
    for (int q = 0; q < 50; ++q) {
      // Half the queries sit on data points to force exact ties.
      const Point3 query = q % 2 ? pts[static_cast<std::size_t>(uniform01(rng) * n)] :
        Point3(uniform(rng, -3, 3), uniform(rng, -3, 3), uniform(rng, -3, 3));

      const auto expect = oracle::nearest(pts, query);
      const auto got = tree.nearest(query);
      CHECK(got.index == expect.index);
      CHECK(got.distance == std::sqrt(expect.d2));

      const std::size_t k = 1 + q % 12;
      const auto knn = tree.k_nearest(query, k);
      const auto knn_expect = oracle::k_nearest(pts, query, k);
      REQUIRE(knn.size() == knn_expect.size());
      for (std::size_t i = 0; i < knn.size(); ++i) {
        CHECK(knn[i].index == knn_expect[i].index);
      }

      const double r = uniform(rng, 0.0, 1.0);
      CHECK(tree.radius_search(query, r) == oracle::radius(pts, query, r));
    }
  }
}

TEST_CASE("k nearest excludes the requested index")
{
  const std::vector<Point3> pts = {Point3(0, 0, 0), Point3(1, 0, 0), Point3(3, 0, 0)};
  const KdTree tree(pts);
  const auto nn = tree.k_nearest(pts[0], 5, 0);
  REQUIRE(nn.size() == 2);
  CHECK(nn[0].index == 1);
  CHECK(nn[1].index == 2);
}

TEST_CASE("equidistant candidates resolve to the lowest index")
{
  const std::vector<Point3> pts = {Point3(1, 0, 0), Point3(-1, 0, 0), Point3(0, 1, 0), Point3(1, 0, 0)};
  const KdTree tree(pts);
  CHECK(tree.nearest(Point3::Zero()).index == 0);
  const auto nn = tree.k_nearest(Point3::Zero(), 4);
  CHECK(nn[0].index == 0);
  CHECK(nn[1].index == 1);
  CHECK(nn[2].index == 2);
  CHECK(nn[3].index == 3);
}

TEST_CASE("kd-tree input validation")
{
  CHECK_THROWS_AS(KdTree(std::vector<Point3>{}), EmptyInput);
  CHECK_THROWS_AS(KdTree(std::vector<Point3>{Point3(NAN, 0, 0)}), NonFiniteInput);
}
