#include "trailnav/traversability_map.hpp"

#include <cmath>
#include <limits>
#include <set>
#include <string>

#include "trailnav/error.hpp"
#include "trailnav/kdtree.hpp"
#include "trailnav/ply.hpp"

namespace trailnav
{

void TraversabilityMap::validate() const
{
  if (traversability.size() != points.size() || labels.size() != points.size()) {
    throw ShapeError("traversability map columns have unequal lengths");
  }
  require_finite(points);
  for (double t : traversability) {
    if (!(t >= 0.0 && t <= 1.0)) {
      throw DomainError("traversability outside [0, 1]");
    }
  }
}

std::size_t MapBuilder::CellHash::operator()(const CellKey & k) const noexcept
{
  std::uint64_t h = static_cast<std::uint64_t>(k.x) * 0x9E3779B97F4A7C15ull;
  h ^= static_cast<std::uint64_t>(k.y) * 0xC2B2AE3D27D4EB4Full + (h >> 29);
  h ^= static_cast<std::uint64_t>(k.z) * 0x165667B19E3779F9ull + (h >> 32);
  return static_cast<std::size_t>(h);
}

MapBuilder::MapBuilder(IntegrationParams params)
: params_(params)
{
  if (!(params_.merge_radius > 0.0)) {
    throw DomainError("merge radius must be positive");
  }
  if (!(params_.min_residual_reduction >= 0.0 && params_.min_residual_reduction < 1.0)) {
    throw DomainError("minimum residual reduction must lie in [0, 1)");
  }
}

MapBuilder::MapBuilder(TraversabilityMap initial, IntegrationParams params)
: MapBuilder(params)
{
  initial.validate();
  const std::uint64_t revision = initial.revision;
  for (std::size_t i = 0; i < initial.size(); ++i) {
    insert(initial.points[i], initial.traversability[i], initial.labels[i]);
  }
  map_.revision = revision;
}

MapBuilder::CellKey MapBuilder::cell_of(const Point3 & p) const
{
  const double s = params_.merge_radius;
  return {static_cast<std::int64_t>(std::floor(p.x() / s)),
    static_cast<std::int64_t>(std::floor(p.y() / s)),
    static_cast<std::int64_t>(std::floor(p.z() / s))};
}

std::optional<std::size_t> MapBuilder::nearest_within_merge(const Point3 & p) const
{
  const CellKey c = cell_of(p);
  const double r2 = params_.merge_radius * params_.merge_radius;
  double best_d2 = std::numeric_limits<double>::infinity();
  std::optional<std::size_t> best;
  for (std::int64_t dx = -1; dx <= 1; ++dx) {
    for (std::int64_t dy = -1; dy <= 1; ++dy) {
      for (std::int64_t dz = -1; dz <= 1; ++dz) {
        const auto it = cells_.find({c.x + dx, c.y + dy, c.z + dz});
        if (it == cells_.end()) {
          continue;
        }
        for (std::uint32_t idx : it->second) {
          const double d2 = KdTree::squared_distance(map_.points[idx], p);
          if (d2 > r2) {
            continue;
          }
          if (d2 < best_d2 || (d2 == best_d2 && idx < *best)) {
            best_d2 = d2;
            best = idx;
          }
        }
      }
    }
  }
  return best;
}

void MapBuilder::insert(const Point3 & p, double t, SemanticClass label)
{
  if (const auto hit = nearest_within_merge(p)) {
    if (t < map_.traversability[*hit]) {
      map_.traversability[*hit] = t;
      map_.labels[*hit] = label;
    }
    return;
  }
  cells_[cell_of(p)].push_back(static_cast<std::uint32_t>(map_.points.size()));
  map_.points.push_back(p);
  map_.traversability.push_back(t);
  map_.labels.push_back(label);
}

std::vector<Point3> MapBuilder::local_points(const Point3 & center, double radius) const
{
  std::vector<Point3> out;
  const double r2 = radius * radius;
  for (const auto & p : map_.points) {
    const double dx = p.x() - center.x();
    const double dy = p.y() - center.y();
    if (dx * dx + dy * dy <= r2) {
      out.push_back(p);
    }
  }
  return out;
}

std::vector<Point3> MapBuilder::overlapping_points(const std::vector<Point3> & cloud,
  const std::vector<Point3> & target, const RigidTransform & guess) const
{
  const double cell = params_.icp_overlap_cell;
  if (!(cell > 0.0)) {
    return cloud;
  }
  auto key = [cell](double x, double y) {
      return std::pair<std::int64_t, std::int64_t>(static_cast<std::int64_t>(std::floor(x / cell)),
      static_cast<std::int64_t>(std::floor(y / cell)));
    };
  std::set<std::pair<std::int64_t, std::int64_t>> occupied;
  for (const auto & p : target) {
    occupied.insert(key(p.x(), p.y()));
  }
  std::vector<Point3> out;
  for (const auto & p : cloud) {
    const Point3 q = guess.apply(p);
    const auto [cx, cy] = key(q.x(), q.y());
    bool inside = true;
    for (std::int64_t dx = -1; dx <= 1 && inside; ++dx) {
      for (std::int64_t dy = -1; dy <= 1 && inside; ++dy) {
        inside = occupied.count({cx + dx, cy + dy}) > 0;
      }
    }
    if (inside) {
      out.push_back(p);
    }
  }
  return out;
}

IntegrationReport MapBuilder::integrate(const FusedCloud & cloud, const RigidTransform & odometry_guess,
  bool force_odometry)
{
  if (cloud.traversability.size() != cloud.points.size() || cloud.labels.size() != cloud.points.size()) {
    throw ShapeError("fused cloud columns have unequal lengths");
  }
  require_finite(cloud.points);
  for (double t : cloud.traversability) {
    if (!(t >= 0.0 && t <= 1.0)) {
      throw DomainError("fused traversability outside [0, 1]");
    }
  }

  IntegrationReport report;
  report.pose = odometry_guess;

  const bool first_frame = map_.empty();
  if (!first_frame && params_.use_icp && !force_odometry && cloud.size() >= 3) {
    const auto target = local_points(odometry_guess.translation(), params_.icp_crop_radius);
    const auto source = overlapping_points(cloud.points, target, odometry_guess);
    if (target.size() >= params_.icp_min_points && source.size() >= params_.icp_min_points) {
      IcpResult icp = icp_register(source, target, odometry_guess, params_.icp);
      const RigidTransform correction = icp.transform * odometry_guess.inverse();
      const double before = icp.residual_history.empty() ? icp.residual : icp.residual_history.front();
      if (correction.translation().norm() <= params_.max_correction_translation &&
        correction.rotation_angle() <= params_.max_correction_rotation &&
        icp.residual <= (1.0 - params_.min_residual_reduction) * before)
      {
        report.pose = icp.transform;
        report.registered = true;
      }
      report.icp = std::move(icp);
    }
  }

  const std::size_t before = map_.size();
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    insert(report.pose.apply(cloud.points[i]), cloud.traversability[i], cloud.labels[i]);
  }
  report.appended = map_.size() - before;
  report.merged = cloud.size() - report.appended;
  report.revision = ++map_.revision;
  return report;
}

MapSnapshot MapBuilder::snapshot() const
{
  if (!cached_ || cached_->revision != map_.revision) {
    cached_ = std::make_shared<const TraversabilityMap>(map_);
  }
  return cached_;
}

TraversabilityMap integrate_frame(const TraversabilityMap & map, const FusedCloud & cloud,
  const RigidTransform & odometry_guess, const IntegrationParams & params)
{
  MapBuilder builder(map, params);
  builder.integrate(cloud, odometry_guess);
  return builder.current();
}

TraversabilityMap crop_map(const TraversabilityMap & map, const Point3 & center, double radius)
{
  TraversabilityMap out;
  out.revision = map.revision;
  const double r2 = radius * radius;
  for (std::size_t i = 0; i < map.size(); ++i) {
    const double dx = map.points[i].x() - center.x();
    const double dy = map.points[i].y() - center.y();
    if (dx * dx + dy * dy <= r2) {
      out.points.push_back(map.points[i]);
      out.traversability.push_back(map.traversability[i]);
      out.labels.push_back(map.labels[i]);
    }
  }
  return out;
}

void write_map(const std::filesystem::path & path, const TraversabilityMap & map, ply::Format format)
{
  map.validate();
  auto table = ply::points_table(map.points);
  table.add_column("traversability", ply::Type::float32, map.traversability);
  std::vector<double> ords;
  ords.reserve(map.size());
  for (auto c : map.labels) {
    ords.push_back(static_cast<double>(ordinal(c)));
  }
  table.add_column("class_ordinal", ply::Type::uint8, std::move(ords));
  ply::write_file(path, table, format);
}

TraversabilityMap read_map(const std::filesystem::path & path)
{
  const auto table = ply::read_file(path);
  TraversabilityMap map;
  map.points = ply::points_from_table(table);
  const auto & t = table.column("traversability");
  for (double v : t) {
    if (!(v >= 0.0 && v <= 1.0)) {
      throw ParseError("traversability value outside [0, 1]");
    }
  }
  map.traversability = t;
  if (table.find("class_ordinal")) {
    for (double v : table.column("class_ordinal")) {
      const auto c = v >= 0.0 ? class_from_ordinal(static_cast<unsigned>(v)) : std::nullopt;
      if (!c) {
        throw ParseError("invalid class_ordinal " + std::to_string(v));
      }
      map.labels.push_back(*c);
    }
  } else {
    map.labels.assign(map.size(), SemanticClass::unlabeled);
  }
  map.validate();
  return map;
}

}  // namespace trailnav
