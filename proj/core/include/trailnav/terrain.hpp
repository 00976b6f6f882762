#ifndef TRAILNAV_TERRAIN_HPP
#define TRAILNAV_TERRAIN_HPP

#include <filesystem>
#include <vector>

#include "trailnav/geometry.hpp"

namespace trailnav
{

/// Hazard at or above which terrain is non-traversable.
inline constexpr double kHazardThreshold = 0.1;

struct TerrainParams
{
  double neighborhood_radius = 0.5;
  double hazard_cap = 1.0;
};

/// Map-frame points with a finite, non-negative hazard each.
struct GeometricCloud
{
  std::vector<Point3> points;
  std::vector<double> hazard;

  std::size_t size() const {return points.size();}
};

/// Per point, over neighbors within `neighborhood_radius` measured in the
/// ground (x, y) plane:
///   step  = z - min z of the neighborhood
///   slope = radius * tan(angle between the PCA plane normal and +z)
///   g     = clamp(max(step, slope), 0, hazard_cap)
/// Fewer than three neighbors, or a spread whose second principal axis has a
/// standard deviation under 0.1 * radius (a line of points), yields slope 0.
/// Throws EmptyInput for an empty scan.
GeometricCloud analyze_terrain(const PointCloud & scan, const TerrainParams & params = {});

/// clamp(1 - g / 0.1, 0, 1): 1 on flat ground, exactly 0 from the threshold up.
/// Throws DomainError for negative or NaN g.
double geometric_score(double hazard);

/// PLY with float x, y, z, hazard.
void write_geometric_cloud(const std::filesystem::path & path, const GeometricCloud & cloud);
GeometricCloud read_geometric_cloud(const std::filesystem::path & path);

}  // namespace trailnav

#endif  // TRAILNAV_TERRAIN_HPP
