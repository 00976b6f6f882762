#ifndef TRAILNAV_FUSION_HPP
#define TRAILNAV_FUSION_HPP

#include <array>
#include <cstddef>
#include <vector>

#include "trailnav/geometry.hpp"
#include "trailnav/semantic.hpp"
#include "trailnav/sensor_pipeline.hpp"
#include "trailnav/terrain.hpp"

namespace trailnav
{

/// Per-class semantic traversability score in [0, 1], higher is better.
class SemanticCostTable
{
public:
  /// trail 1.0, grass 0.7, rough_trail 0.5, root 0.4, vegetation 0.3,
  /// rock 0.2, structure 0.0, tree_trunk 0.0, unlabeled 0.5.
  SemanticCostTable();

  double operator[](SemanticClass c) const {return scores_[ordinal(c)];}
  /// Throws DomainError outside [0, 1].
  void set(SemanticClass c, double score);

private:
  std::array<double, kNumClasses> scores_;
};

/// Convex mixing weight between semantic (w) and geometric (1 - w) scores.
class FusionWeight
{
public:
  /// Throws DomainError outside [0, 1].
  explicit FusionWeight(double w);
  double value() const {return w_;}

private:
  double w_;
};

/// T = C_s w + C_g (1 - w). Throws DomainError if either score is outside [0, 1].
double fuse(double semantic_score, double geometric_score, FusionWeight w);

struct AssociationPair
{
  std::size_t semantic;
  std::size_t geometric;
  double distance;
};

struct AssociationResult
{
  /// One entry per matched semantic point, in semantic index order.
  std::vector<AssociationPair> pairs;
  std::vector<std::size_t> unmatched_semantic;
  /// Reverse direction: nearest semantic index per geometric point within the
  /// cutoff, or kNone.
  std::vector<std::size_t> geometric_to_semantic;

  static constexpr std::size_t kNone = static_cast<std::size_t>(-1);
};

/// Nearest-neighbor association in both directions using one k-d tree per
/// cloud. Pairs farther than `cutoff` are reported as unmatched. Both clouds
/// must already be in the map frame. Throws EmptyInput if either is empty.
AssociationResult associate(const LabeledPointCloud & semantic, const GeometricCloud & geometric, double cutoff);

/// Points carrying fused traversability, positioned at the semantic points.
struct FusedCloud
{
  std::vector<Point3> points;
  std::vector<double> traversability;
  std::vector<SemanticClass> labels;
  Frame frame = Frame::map;

  std::size_t size() const {return points.size();}
};

struct FusionParams
{
  double association_cutoff = 0.3;
  /// C_g used when no geometric point lies within the cutoff.
  double unmatched_geometric_score = 0.5;
};

FusedCloud fuse_clouds(const LabeledPointCloud & semantic, const GeometricCloud & geometric,
  const SemanticCostTable & table, FusionWeight w, const FusionParams & params = {});

FusedCloud transform_apply(const RigidTransform & transform, const FusedCloud & cloud, Frame target);

}  // namespace trailnav

#endif  // TRAILNAV_FUSION_HPP
