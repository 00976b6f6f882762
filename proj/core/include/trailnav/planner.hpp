#ifndef TRAILNAV_PLANNER_HPP
#define TRAILNAV_PLANNER_HPP

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <vector>

#include "trailnav/geometry.hpp"
#include "trailnav/kdtree.hpp"
#include "trailnav/random.hpp"
#include "trailnav/traversability_map.hpp"

namespace trailnav
{

struct PlanConfig
{
  /// Traversability weight W of the edge penalty.
  double traversability_weight = 5.0;
  double step_size = 1.0;
  double neighbor_radius = 2.0;
  std::size_t max_iterations = 5000;
  double goal_tolerance = 0.5;
  double goal_bias = 0.05;
  std::uint64_t rng_seed = 0;
  /// T at a free position is the T of the nearest map point within this radius.
  double interp_radius = 0.3;
  /// Spacing of the T > 0 samples taken along every edge.
  double edge_resolution = 0.1;
  /// Extra keep-out: positions closer than this to any T = 0 map point are
  /// rejected. 0 disables it.
  double clearance = 0.0;

  /// Throws ParamError on invalid values.
  void validate() const;
};

/// Continuous traversability lookup over a map snapshot.
class TraversabilityField
{
public:
  /// Throws NoTraversableSpace for an empty map.
  TraversabilityField(MapSnapshot map, double interp_radius, double clearance = 0.0);

  /// Nearest map point's T if within the interpolation radius, else 0.
  double at(const Point3 & p) const;
  /// at(p) > 0 and no collision-space point within the clearance, measured
  /// in the ground plane.
  bool admissible(const Point3 & p) const;
  /// Every sample at `resolution` spacing, endpoints included, is admissible.
  bool segment_free(const Point3 & a, const Point3 & b, double resolution) const;

  const TraversabilityMap & map() const {return *map_;}
  const MapSnapshot & snapshot() const {return map_;}

private:
  MapSnapshot map_;
  KdTree tree_;
  std::optional<KdTree> blocked_;
  double interp_radius_;
  double clearance_;
};

/// Categorical distribution over map points proportional to T.
class TraversabilitySampler
{
public:
  /// Throws NoTraversableSpace when no point has T > 0.
  explicit TraversabilitySampler(MapSnapshot map);

  std::size_t sample_index(Rng & rng) const;
  Point3 sample(Rng & rng) const {return map_->points[sample_index(rng)];}

private:
  MapSnapshot map_;
  std::vector<double> cumulative_;
};

/// Goal with probability goal_bias, otherwise a T-weighted map point.
Point3 sample_candidate(const TraversabilitySampler & sampler, const Point3 & goal, double goal_bias, Rng & rng);

struct TreeNode
{
  Point3 position;
  /// -1 for the root.
  std::int64_t parent = -1;
  /// Accumulated cost from the root.
  double cost = 0.0;
  double traversability = 1.0;
};

/// d + W / mean(T_parent, T_child), with the penalty dropped when both T are
/// exactly 1. Throws CollisionSpace if either T is not positive.
double edge_cost(double parent_traversability, double child_traversability, double distance, double weight);
double edge_cost(const TreeNode & parent, const Point3 & child_position, double child_traversability,
  double weight);

struct Waypoint
{
  Point3 position;
  /// Accumulated cost at this point; interpolated inside subdivided edges.
  double cost = 0.0;
};

struct PlanResult
{
  /// Start to goal, consecutive entries at most step_size apart.
  std::vector<Waypoint> waypoints;
  /// Tree indices of the path nodes, root first.
  std::vector<std::size_t> node_path;
  double total_cost = 0.0;
  std::size_t iterations = 0;
  bool success = false;
  std::vector<TreeNode> tree;
};

/// Traversability-biased RRT* over an immutable map snapshot.
///
/// Candidates are drawn with sample_candidate, steered to at most step_size
/// from the nearest tree node, and admitted only on admissible positions with
/// collision-free edges. Parent choice and rewiring use edge_cost within
/// neighbor_radius; every cost decrease is propagated and re-checked against
/// neighbors, so at termination no node can be improved by re-parenting.
///
/// Throws NoTraversableSpace when the map has no traversable point or the
/// start is in collision space. Running out of iterations returns
/// success == false with the tree retained.
PlanResult plan(MapSnapshot map, const Point3 & start, const Point3 & goal, const PlanConfig & config);
PlanResult plan(const TraversabilityField & field, const TraversabilitySampler & sampler,
  const Point3 & start, const Point3 & goal, const PlanConfig & config);

/// Root-to-node path with edges subdivided to at most max_spacing.
std::vector<Waypoint> extract_waypoints(std::span<const TreeNode> tree, std::size_t node, double max_spacing,
  std::vector<std::size_t> * node_path = nullptr);

/// Node minimizing cost + cost_to_go_per_meter * |node - goal|; ties go to the
/// lowest index. Nodes nearer than min_distance to the root are skipped
/// unless no other node exists.
std::size_t best_frontier_node(std::span<const TreeNode> tree, const Point3 & goal, double cost_to_go_per_meter,
  double min_distance = 0.0);

/// Sum of edge_cost along consecutive nodes, recomputed from scratch.
double path_cost(std::span<const TreeNode> tree, std::span<const std::size_t> node_path, double weight);

/// Receding-horizon lookup: the first waypoint at least `lookahead` of arc
/// length past the robot's closest point on the path, or the last waypoint
/// when none is that far. Throws ReplanRequired if the robot is farther than
/// corridor_tolerance from the path, InputError on an empty path.
Point3 next_waypoint(std::span<const Waypoint> waypoints, const Point3 & robot, double lookahead,
  double corridor_tolerance);
Point3 next_waypoint(const PlanResult & result, const Point3 & robot, double lookahead,
  double corridor_tolerance);

/// CSV x,y,z,cumulative_cost.
void write_waypoints_csv(const std::filesystem::path & path, std::span<const Waypoint> waypoints);
/// CSV parent_index,x,y,z,c,T (root parent is -1).
void write_tree_csv(const std::filesystem::path & path, std::span<const TreeNode> tree);

}  // namespace trailnav

#endif  // TRAILNAV_PLANNER_HPP
