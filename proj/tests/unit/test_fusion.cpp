#include "doctest.h"

#include <cmath>

#include "oracles.hpp"
#include "trailnav/error.hpp"
#include "trailnav/fusion.hpp"

using namespace trailnav;

TEST_CASE("default semantic table")
{
  const SemanticCostTable t;
  CHECK(t[SemanticClass::trail] == 1.0);
  CHECK(t[SemanticClass::grass] == 0.7);
  CHECK(t[SemanticClass::rough_trail] == 0.5);
  CHECK(t[SemanticClass::root] == 0.4);
  CHECK(t[SemanticClass::vegetation] == 0.3);
  CHECK(t[SemanticClass::rock] == 0.2);
  CHECK(t[SemanticClass::structure] == 0.0);
  CHECK(t[SemanticClass::tree_trunk] == 0.0);
  CHECK(t[SemanticClass::unlabeled] == 0.5);
  SemanticCostTable u;
  u.set(SemanticClass::grass, 0.9);
  CHECK(u[SemanticClass::grass] == 0.9);
  CHECK_THROWS_AS(u.set(SemanticClass::grass, 1.5), DomainError);
}

TEST_CASE("fuse arithmetic")
{
  CHECK(fuse(0.8, 0.4, FusionWeight(0.75)) == doctest::Approx(0.7));
  CHECK(fuse(1.0, 0.0, FusionWeight(0.5)) == 0.5);
  CHECK_THROWS_AS(FusionWeight(-0.1), DomainError);
  CHECK_THROWS_AS(FusionWeight(1.1), DomainError);
  CHECK_THROWS_AS(fuse(1.2, 0.5, FusionWeight(0.5)), DomainError);
  CHECK_THROWS_AS(fuse(0.5, NAN, FusionWeight(0.5)), DomainError);
}

TEST_CASE("fuse endpoints are exact and the weight enters affinely")
{
  Rng rng(7);
  for (int i = 0; i < 1000; ++i) {
    const double cs = uniform01(rng);
    const double cg = uniform01(rng);
    CHECK(fuse(cs, cg, FusionWeight(0.0)) == cg);
    CHECK(fuse(cs, cg, FusionWeight(1.0)) == cs);
    const double w = uniform01(rng);
    const double t = fuse(cs, cg, FusionWeight(w));
    CHECK(std::abs(t - (cg + w * (cs - cg))) <= 1e-12);
    CHECK(t >= 0.0);
    CHECK(t <= 1.0);
  }
}

TEST_CASE("association matches brute force in both directions")
{
  Rng rng(8);
  for (int instance = 0; instance < 20; ++instance) {
    const std::size_t ns = 1 + static_cast<std::size_t>(uniform01(rng) * 500);
    const std::size_t ng = 1 + static_cast<std::size_t>(uniform01(rng) * 500);
    const auto sp = oracle::random_cloud(rng, ns);
    auto gp = oracle::random_cloud(rng, ng);
    const LabeledPointCloud sem(sp, std::vector<SemanticClass>(ns, SemanticClass::grass), Frame::map);
    GeometricCloud geo;
    geo.points = gp;
    geo.hazard.assign(ng, 0.0);
    const double cutoff = uniform(rng, 0.05, 0.5);
    const auto got = associate(sem, geo, cutoff);

    const auto forward = oracle::associate(sp, gp, cutoff);
    std::size_t pair = 0;
    std::size_t unmatched = 0;
    for (std::size_t i = 0; i < ns; ++i) {
      if (forward[i] < 0) {
        REQUIRE(unmatched < got.unmatched_semantic.size());
        CHECK(got.unmatched_semantic[unmatched++] == i);
      } else {
        REQUIRE(pair < got.pairs.size());
        CHECK(got.pairs[pair].semantic == i);
        CHECK(got.pairs[pair].geometric == static_cast<std::size_t>(forward[i]));
        ++pair;
      }
    }
    CHECK(pair == got.pairs.size());
    CHECK(unmatched == got.unmatched_semantic.size());

    const auto backward = oracle::associate(gp, sp, cutoff);
    for (std::size_t j = 0; j < ng; ++j) {
      const std::size_t expect = backward[j] < 0 ? AssociationResult::kNone : static_cast<std::size_t>(backward[j]);
      CHECK(got.geometric_to_semantic[j] == expect);
    }
  }
}

TEST_CASE("fused cloud uses the neutral score for unmatched points")
{
  const LabeledPointCloud sem({Point3(0, 0, 0), Point3(10, 0, 0)}, {SemanticClass::trail, SemanticClass::grass},
    Frame::map);
  GeometricCloud geo;
  geo.points = {Point3(0.1, 0, 0)};
  geo.hazard = {0.05};
  const auto fused = fuse_clouds(sem, geo, SemanticCostTable(), FusionWeight(0.5));
  REQUIRE(fused.size() == 2);
  CHECK(fused.traversability[0] == doctest::Approx(0.5 * 1.0 + 0.5 * 0.5));
  CHECK(fused.traversability[1] == doctest::Approx(0.5 * 0.7 + 0.5 * 0.5));
  CHECK(fused.points[1] == Point3(10, 0, 0));
  CHECK(fused.labels[0] == SemanticClass::trail);
}

TEST_CASE("association input validation")
{
  const LabeledPointCloud sem({Point3::Zero()}, {SemanticClass::trail}, Frame::map);
  CHECK_THROWS_AS(associate(sem, GeometricCloud{}, 0.3), EmptyInput);
  GeometricCloud geo;
  geo.points = {Point3::Zero()};
  geo.hazard = {0.0};
  CHECK_THROWS_AS(associate(sem, geo, 0.0), DomainError);
}

TEST_CASE("class names round trip")
{
  for (std::size_t i = 0; i < kNumClasses; ++i) {
    const auto c = *class_from_ordinal(static_cast<unsigned>(i));
    CHECK(class_from_name(class_name(c)) == c);
  }
  CHECK_FALSE(class_from_ordinal(9).has_value());
  CHECK_FALSE(class_from_name("lava").has_value());
}
