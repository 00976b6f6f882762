#ifndef TRAILNAV_TRAVERSABILITY_MAP_HPP
#define TRAILNAV_TRAVERSABILITY_MAP_HPP

#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <unordered_map>
#include <vector>

#include "trailnav/fusion.hpp"
#include "trailnav/geometry.hpp"
#include "trailnav/icp.hpp"
#include "trailnav/ply.hpp"
#include "trailnav/semantic.hpp"

namespace trailnav
{

/// Global registered cloud. T in [0, 1] per point: 0 is collision space,
/// 1 the most traversable terrain.
struct TraversabilityMap
{
  std::vector<Point3> points;
  std::vector<double> traversability;
  std::vector<SemanticClass> labels;
  std::uint64_t revision = 0;

  std::size_t size() const {return points.size();}
  bool empty() const {return points.empty();}
  /// Throws ShapeError / DomainError / NonFiniteInput when invariants fail.
  void validate() const;
};

using MapSnapshot = std::shared_ptr<const TraversabilityMap>;

struct IntegrationParams
{
  double merge_radius = 0.1;
  bool use_icp = true;
  IcpParams icp{};
  /// Only map points within this distance of the guessed sensor position
  /// take part in registration.
  double icp_crop_radius = 10.0;
  std::size_t icp_min_points = 50;
  /// Only newest-cloud points whose ground cell of this size, and all eight
  /// neighboring cells, already hold map points take part in registration.
  /// Points past the map frontier have no true partner and would drag the
  /// estimate backwards on flat ground. 0 disables the restriction.
  double icp_overlap_cell = 0.5;
  /// Refinements moving the pose further than this from the guess are
  /// discarded in favor of odometry.
  double max_correction_translation = 1.0;
  double max_correction_rotation = 0.2;
  /// Refinements must cut the residual at the guess by at least this
  /// fraction. On sparse, mostly flat ground point-to-point ICP slides the
  /// cloud a few centimeters per frame to snap samples together, lowering
  /// the residual only slightly; accepting that compounds into drift.
  double min_residual_reduction = 0.5;
};

struct IntegrationReport
{
  RigidTransform pose;
  bool registered = false;
  std::optional<IcpResult> icp;
  std::size_t appended = 0;
  std::size_t merged = 0;
  std::uint64_t revision = 0;
};

/// Single-writer incremental map. Every integrate() bumps the revision;
/// snapshot() hands out immutable copies that never change afterwards.
class MapBuilder
{
public:
  explicit MapBuilder(IntegrationParams params = {});
  explicit MapBuilder(TraversabilityMap initial, IntegrationParams params = {});

  /// `cloud` is in the sensor frame; `odometry_guess` maps it into the map
  /// frame. The first frame is placed at the guess without registration.
  /// Later frames are refined by ICP against the local map unless
  /// `force_odometry` is set. Propagates DegenerateGeometry from ICP.
  ///
  /// Each point, in order, merges into the nearest existing point within
  /// merge_radius (lowest index on ties), keeping the minimum T and that
  /// observation's class; otherwise it is appended.
  IntegrationReport integrate(const FusedCloud & cloud, const RigidTransform & odometry_guess,
    bool force_odometry = false);

  const TraversabilityMap & current() const {return map_;}
  MapSnapshot snapshot() const;
  const IntegrationParams & params() const {return params_;}

private:
  struct CellKey
  {
    std::int64_t x, y, z;
    bool operator==(const CellKey &) const = default;
  };
  struct CellHash
  {
    std::size_t operator()(const CellKey & k) const noexcept;
  };

  CellKey cell_of(const Point3 & p) const;
  std::optional<std::size_t> nearest_within_merge(const Point3 & p) const;
  void insert(const Point3 & p, double t, SemanticClass label);
  std::vector<Point3> local_points(const Point3 & center, double radius) const;
  std::vector<Point3> overlapping_points(const std::vector<Point3> & cloud, const std::vector<Point3> & target,
    const RigidTransform & guess) const;

  IntegrationParams params_;
  TraversabilityMap map_;
  std::unordered_map<CellKey, std::vector<std::uint32_t>, CellHash> cells_;
  mutable MapSnapshot cached_;
};

/// Value-semantics form of MapBuilder::integrate.
TraversabilityMap integrate_frame(const TraversabilityMap & map, const FusedCloud & cloud,
  const RigidTransform & odometry_guess, const IntegrationParams & params = {});

/// Copy of the points within `radius` of `center` (ground-plane distance).
TraversabilityMap crop_map(const TraversabilityMap & map, const Point3 & center, double radius);

/// PLY with float x, y, z, traversability and uchar class_ordinal.
void write_map(const std::filesystem::path & path, const TraversabilityMap & map,
  ply::Format format = ply::Format::binary_little_endian);
/// Throws ParseError on a malformed or out-of-range file.
TraversabilityMap read_map(const std::filesystem::path & path);

}  // namespace trailnav

#endif  // TRAILNAV_TRAVERSABILITY_MAP_HPP
