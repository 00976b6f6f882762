#include "doctest.h"

#include <cmath>
#include <queue>
#include <sstream>

#include "trailnav/error.hpp"
#include "trailnav/sim/metrics.hpp"
#include "trailnav/sim/sensors.hpp"
#include "trailnav/sim/world.hpp"

using namespace trailnav;
using namespace trailnav::sim;

namespace
{

WorldModel flat_world(int nx, int ny, SemanticClass cls = SemanticClass::grass)
{
  WorldModel w;
  w.resolution = 0.1;
  w.nx = nx;
  w.ny = ny;
  w.heights.assign(static_cast<std::size_t>(nx + 1) * (ny + 1), 0.0);
  w.classes.assign(static_cast<std::size_t>(nx) * ny, cls);
  w.hazard.assign(w.classes.size(), 0.0);
  w.finalize();
  return w;
}

}  // namespace

TEST_CASE("generation is deterministic per seed")
{
  const auto a = generate_world(5);
  const auto b = generate_world(5);
  const auto c = generate_world(6);
  CHECK(a.heights == b.heights);
  CHECK(a.classes == b.classes);
  CHECK(a.hazard == b.hazard);
  CHECK(a.heights != c.heights);
}

TEST_CASE("preset worlds have a connected trail ribbon between start and goal")
{
  CHECK(preset_names().size() == 2);
  CHECK_FALSE(preset_world("path3").has_value());
  for (auto name : preset_names()) {
    const auto w = *preset_world(name);
    CHECK(w.class_at(w.start.x(), w.start.y()) == SemanticClass::trail);
    CHECK(w.class_at(w.goal.x(), w.goal.y()) == SemanticClass::trail);
    for (double h : w.heights) {
      CHECK(std::isfinite(h));
    }

    // Flood fill from the start over trail cells and the hazards that block
    // the trail across its full width.
    std::vector<char> seen(w.classes.size(), 0);
    std::queue<std::size_t> open;
    const std::size_t s = *w.cell_index(w.start.x(), w.start.y());
    open.push(s);
    seen[s] = 1;
    std::size_t reached = 0;
    while (!open.empty()) {
      const std::size_t c = open.front();
      open.pop();
      reached += w.classes[c] == SemanticClass::trail;
      const int i = static_cast<int>(c % w.nx);
      const int j = static_cast<int>(c / w.nx);
      const int di[4] = {1, -1, 0, 0};
      const int dj[4] = {0, 0, 1, -1};
      for (int k = 0; k < 4; ++k) {
        const int a = i + di[k];
        const int b = j + dj[k];
        if (a < 0 || b < 0 || a >= w.nx || b >= w.ny) {
          continue;
        }
        const std::size_t n = static_cast<std::size_t>(b) * w.nx + a;
        const bool walkable = w.classes[n] == SemanticClass::trail || w.classes[n] == SemanticClass::tree_trunk ||
          w.classes[n] == SemanticClass::structure;
        if (!seen[n] && walkable) {
          seen[n] = 1;
          open.push(n);
        }
      }
    }
    std::size_t trail_cells = 0;
    for (auto cls : w.classes) {
      trail_cells += cls == SemanticClass::trail;
    }
    CHECK(reached == trail_cells);
    CHECK(seen[*w.cell_index(w.goal.x(), w.goal.y())]);
  }
}

TEST_CASE("world file round trip")
{
  const auto w = generate_world(9);
  std::stringstream ss;
  save_world(ss, w);
  const auto back = load_world(ss);
  CHECK(back.seed == w.seed);
  CHECK(back.heights == w.heights);
  CHECK(back.classes == w.classes);
  CHECK(back.hazard == w.hazard);
  CHECK(back.obstacles.size() == w.obstacles.size());
  CHECK(back.trail == w.trail);
  CHECK(back.start == w.start);
  CHECK(back.max_slope() == w.max_slope());

  std::stringstream bad("TNWX");
  CHECK_THROWS_AS(load_world(bad), ParseError);
  std::string bytes;
  {
    std::stringstream full;
    save_world(full, w);
    bytes = full.str();
  }
  std::stringstream truncated(bytes.substr(0, bytes.size() / 2));
  CHECK_THROWS_AS(load_world(truncated), ParseError);
  CHECK_THROWS_AS(load_world_file("/nonexistent/world.tnw"), InputError);
}

TEST_CASE("parameter validation")
{
  WorldParams p;
  p.resolution = 0.0;
  CHECK_THROWS_AS(generate_world(1, p), ParamError);
  p = WorldParams{};
  p.trail_length = 500.0;
  CHECK_THROWS_AS(generate_world(1, p), ParamError);
  p = WorldParams{};
  p.trail_roughness = -0.1;
  CHECK_THROWS_AS(generate_world(1, p), ParamError);
}

TEST_CASE("impassability")
{
  auto w = flat_world(10, 10);
  w.classes[0] = SemanticClass::tree_trunk;
  w.hazard[1] = 0.1;
  w.hazard[2] = 0.099;
  CHECK(w.impassable_at(0.05, 0.05));
  CHECK(w.impassable_at(0.15, 0.05));
  CHECK_FALSE(w.impassable_at(0.25, 0.05));
  CHECK(w.impassable_at(-0.01, 0.5));
  CHECK(w.impassable_at(1.0, 0.5));
  CHECK(class_speed_factor(SemanticClass::vegetation) == 0.5);
  CHECK(class_speed_factor(SemanticClass::rock) == 0.0);
}

TEST_CASE("rays against flat ground and a cylinder")
{
  auto w = flat_world(100, 100);
  const auto down = cast_ray(w, Point3(5, 5, 1), Point3(0, 0, -1), 10.0);
  REQUIRE(down.has_value());
  CHECK(down->range == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(down->label == SemanticClass::grass);

  const Point3 dir = Point3(1, 0, -1).normalized();
  const auto slant = cast_ray(w, Point3(2, 5, 1), dir, 10.0);
  REQUIRE(slant.has_value());
  CHECK(slant->point.x() == doctest::Approx(3.0).epsilon(1e-9));
  CHECK_FALSE(cast_ray(w, Point3(5, 5, 1), Point3(0, 0, 1), 10.0).has_value());
  CHECK_FALSE(cast_ray(w, Point3(5, 5, 1), Point3(0, 0, -1), 0.5).has_value());

  Obstacle o;
  o.cx = 7.0;
  o.cy = 5.0;
  o.radius = 0.5;
  o.height = 2.0;
  w.obstacles.push_back(o);
  w.finalize();
  const auto side = cast_ray(w, Point3(5, 5, 0.5), Point3(1, 0, 0), 10.0);
  REQUIRE(side.has_value());
  CHECK(side->range == doctest::Approx(1.5).epsilon(1e-9));
  CHECK(side->label == SemanticClass::tree_trunk);
}

TEST_CASE("a scan of flat ground lies on the ground plane")
{
  const auto w = flat_world(200, 200);
  ScanPattern pattern;
  pattern.azimuth_count = 36;
  pattern.elevations = ScanPattern::uniform_rings(-0.6, -0.2, 4);
  pattern.max_range = 8.0;
  Rng rng(1);
  const auto base = RigidTransform::from_yaw(0.3, {10, 10, 0});
  const auto scan = render_scan(w, base, pattern, rng);
  CHECK(scan.size() == 36 * 4);
  CHECK(scan.frame() == Frame::sensor);
  for (const auto & p : scan) {
    CHECK((base * pattern.sensor_to_base()).apply(p).z() == doctest::Approx(0.0).scale(1.0).epsilon(1e-6));
  }
}

TEST_CASE("rendered camera depth matches the ground plane")
{
  const auto w = flat_world(200, 200, SemanticClass::trail);
  const auto k = CameraIntrinsics::from_horizontal_fov(16, 12, M_PI / 2);
  const CameraMount mount;
  Rng rng(2);
  const auto base = RigidTransform::from_yaw(0.0, {10, 10, 0});
  const auto frame = render_frame(w, base, base, k, mount, 0.0, rng);
  const auto cloud = backproject(frame, k);
  REQUIRE(cloud.size() > 0);
  const auto in_map = transform_apply(frame.pose, cloud);
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    CHECK(std::abs(in_map.points()[i].z()) < 1e-5);
    CHECK(in_map.labels()[i] == SemanticClass::trail);
  }
}

TEST_CASE("label noise replaces classes at the requested rate")
{
  const auto w = flat_world(200, 200, SemanticClass::trail);
  const auto k = CameraIntrinsics::from_horizontal_fov(64, 48, M_PI / 2);
  Rng rng(3);
  const auto base = RigidTransform::from_yaw(0.0, {10, 10, 0});
  const auto frame = render_frame(w, base, base, k, CameraMount{}, 0.3, rng);
  std::size_t hits = 0;
  std::size_t changed = 0;
  for (std::size_t i = 0; i < frame.depth.data.size(); ++i) {
    if (std::isfinite(frame.depth.data[i])) {
      ++hits;
      changed += frame.labels.data[i] != SemanticClass::trail;
    }
  }
  REQUIRE(hits > 500);
  CHECK(std::abs(static_cast<double>(changed) / hits - 0.3) < 0.05);
}

TEST_CASE("run metrics")
{
  auto w = flat_world(100, 10);
  for (int j = 0; j < 10; ++j) {
    for (int i = 0; i < 50; ++i) {
      w.classes[static_cast<std::size_t>(j) * 100 + i] = SemanticClass::trail;
    }
  }
  const std::vector<TrajectorySample> half = {{Point3(1, 0.5, 0), 0.0}, {Point3(5, 0.5, 0), 2.0},
    {Point3(9, 0.5, 0), 4.0}};
  const auto m = score_run(w, half);
  CHECK(m.distance_traveled == doctest::Approx(8.0));
  CHECK(m.time_to_traverse == 4.0);
  CHECK(m.pct_on_trail == doctest::Approx(50.0));
  CHECK_FALSE(m.success);

  const std::vector<TrajectorySample> still = {{Point3(1, 0.5, 0), 0.0}};
  CHECK(score_run(w, still).pct_on_trail == 0.0);
  CHECK_THROWS_AS(score_run(w, std::vector<TrajectorySample>{}), InputError);
  const std::vector<TrajectorySample> unsorted = {{Point3(1, 0.5, 0), 1.0}, {Point3(2, 0.5, 0), 0.5}};
  CHECK_THROWS_AS(score_run(w, unsorted), InputError);
}
