#include <benchmark/benchmark.h>

#include <cmath>
#include <memory>
#include <vector>

#include "trailnav/icp.hpp"
#include "trailnav/kdtree.hpp"
#include "trailnav/planner.hpp"
#include "trailnav/random.hpp"
#include "trailnav/sensor_pipeline.hpp"
#include "trailnav/terrain.hpp"

using namespace trailnav;

namespace
{

std::vector<Point3> ground(std::size_t n, std::uint64_t seed = 1)
{
  Rng rng(seed);
  std::vector<Point3> pts;
  pts.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double x = uniform(rng, -8, 8);
    const double y = uniform(rng, -8, 8);
    pts.emplace_back(x, y, 0.2 * std::sin(0.7 * x) * std::cos(0.5 * y) + uniform(rng, -0.01, 0.01));
  }
  return pts;
}

LabeledPointCloud labeled(const std::vector<Point3> & pts)
{
  return LabeledPointCloud(pts, std::vector<SemanticClass>(pts.size(), SemanticClass::grass), Frame::map);
}

}  // namespace

static void BM_KdTreeBuild(benchmark::State & state)
{
  const auto pts = ground(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) {
    KdTree tree(pts);
    benchmark::DoNotOptimize(tree.size());
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_KdTreeBuild)->Range(1 << 10, 1 << 16);

static void BM_KdTreeNearest(benchmark::State & state)
{
  const auto pts = ground(static_cast<std::size_t>(state.range(0)));
  const KdTree tree(pts);
  const auto queries = ground(1024, 2);
  std::size_t q = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(tree.nearest(queries[q++ % queries.size()]));
  }
}
BENCHMARK(BM_KdTreeNearest)->Range(1 << 10, 1 << 16);

static void BM_VoxelDownsample(benchmark::State & state)
{
  const auto cloud = labeled(ground(static_cast<std::size_t>(state.range(0))));
  for (auto _ : state) {
    benchmark::DoNotOptimize(voxel_downsample(cloud, 0.1).size());
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_VoxelDownsample)->Range(1 << 10, 1 << 16);

static void BM_OutlierRemoval(benchmark::State & state)
{
  const auto cloud = labeled(ground(static_cast<std::size_t>(state.range(0))));
  for (auto _ : state) {
    benchmark::DoNotOptimize(statistical_outlier_removal(cloud, 10, 2.0).size());
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_OutlierRemoval)->Range(1 << 10, 1 << 14);

static void BM_TerrainAnalysis(benchmark::State & state)
{
  const PointCloud scan(ground(static_cast<std::size_t>(state.range(0))), Frame::map);
  for (auto _ : state) {
    benchmark::DoNotOptimize(analyze_terrain(scan).points.size());
  }
}
BENCHMARK(BM_TerrainAnalysis)->Arg(2000)->Arg(5400);

static void BM_Icp(benchmark::State & state)
{
  const auto global = ground(static_cast<std::size_t>(state.range(0)));
  const KdTree tree(global);
  const auto truth = RigidTransform::from_yaw(0.05, {0.2, -0.1, 0.0});
  const auto newest = transform_points(truth.inverse(), global);
  for (auto _ : state) {
    benchmark::DoNotOptimize(icp_register(newest, tree, RigidTransform::identity()).residual);
  }
}
BENCHMARK(BM_Icp)->Arg(500)->Arg(5000);

static void BM_Plan(benchmark::State & state)
{
  auto map = std::make_shared<TraversabilityMap>();
  for (int i = 0; i <= 160; ++i) {
    for (int j = 0; j <= 80; ++j) {
      const Point3 p(0.1 * i, 0.1 * j, 0.0);
      map->points.push_back(p);
      map->traversability.push_back(std::abs(p.y() - 4.0) < 0.8 ? 1.0 : 0.6);
      map->labels.push_back(SemanticClass::grass);
    }
  }
  const MapSnapshot snapshot = map;
  PlanConfig config;
  config.max_iterations = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(plan(snapshot, Point3(1, 4, 0), Point3(15, 4, 0), config).tree.size());
  }
}
BENCHMARK(BM_Plan)->Arg(1000)->Arg(5000)->Unit(benchmark::kMillisecond);
BENCHMARK_MAIN();
