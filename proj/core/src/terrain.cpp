#include "trailnav/terrain.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/Eigenvalues>

#include "trailnav/error.hpp"
#include "trailnav/kdtree.hpp"
#include "trailnav/ply.hpp"

namespace trailnav
{

namespace
{

/// Minimum standard deviation along the second principal axis, as a
/// fraction of the neighborhood radius, for the plane fit to count.
constexpr double kMinPlaneSpread = 0.1;

}  // namespace

GeometricCloud analyze_terrain(const PointCloud & scan, const TerrainParams & params)
{
  if (scan.empty()) {
    throw EmptyInput("terrain analysis needs a non-empty scan");
  }
  if (!(params.neighborhood_radius > 0.0)) {
    throw DomainError("neighborhood radius must be positive");
  }
  const double radius = params.neighborhood_radius;

  std::vector<Point3> flat;
  flat.reserve(scan.size());
  for (const auto & p : scan) {
    flat.emplace_back(p.x(), p.y(), 0.0);
  }
  const KdTree tree(flat);

  GeometricCloud out;
  out.points.assign(scan.begin(), scan.end());
  out.hazard.resize(scan.size());

  std::vector<std::size_t> nbrs;
  for (std::size_t i = 0; i < scan.size(); ++i) {
    nbrs.clear();
    tree.for_each_in_radius(flat[i], radius, [&](std::size_t j) {nbrs.push_back(j);});

    const Point3 & p = scan[i];
    double z_min = p.z();
    Point3 mean = Point3::Zero();
    for (std::size_t j : nbrs) {
      z_min = std::min(z_min, scan[j].z());
      mean += scan[j] - p;
    }
    const double step = p.z() - z_min;

    double slope_term = 0.0;
    if (nbrs.size() >= 3) {
      mean /= static_cast<double>(nbrs.size());
      Eigen::Matrix3d cov = Eigen::Matrix3d::Zero();
      for (std::size_t j : nbrs) {
        const Eigen::Vector3d d = scan[j] - p - mean;
        cov += d * d.transpose();
      }
      cov /= static_cast<double>(nbrs.size());
      Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> eig;
      eig.computeDirect(cov);
      const Eigen::Vector3d ev = eig.eigenvalues();
      // Need a genuine 2-D spread. A single scan ring seen at long range is
      // a noisy line whose fitted normal is arbitrary.
      const double min_spread = kMinPlaneSpread * radius;
      if (ev[1] >= min_spread * min_spread && ev[1] > 1e-12 * std::max(1.0, ev[2])) {
        const Eigen::Vector3d n = eig.eigenvectors().col(0);
        const double nz = std::abs(n.z());
        const double horiz = std::sqrt(std::max(0.0, 1.0 - nz * nz));
        slope_term = nz > 0.0 ? radius * horiz / nz : std::numeric_limits<double>::infinity();
      }
    }
    out.hazard[i] = std::clamp(std::max(step, slope_term), 0.0, params.hazard_cap);
  }
  return out;
}

double geometric_score(double hazard)
{
  if (!(hazard >= 0.0)) {
    throw DomainError("hazard must be a non-negative number");
  }
  if (hazard >= kHazardThreshold) {
    return 0.0;
  }
  return std::clamp(1.0 - hazard / kHazardThreshold, 0.0, 1.0);
}

void write_geometric_cloud(const std::filesystem::path & path, const GeometricCloud & cloud)
{
  auto table = ply::points_table(cloud.points);
  table.add_column("hazard", ply::Type::float32, cloud.hazard);
  ply::write_file(path, table, ply::Format::binary_little_endian);
}

GeometricCloud read_geometric_cloud(const std::filesystem::path & path)
{
  const auto table = ply::read_file(path);
  GeometricCloud cloud;
  cloud.points = ply::points_from_table(table);
  cloud.hazard = table.column("hazard");
  for (double g : cloud.hazard) {
    if (!(g >= 0.0) || !std::isfinite(g)) {
      throw ParseError("hazard values must be finite and non-negative");
    }
  }
  return cloud;
}

}  // namespace trailnav
