#include "trailnav/planner.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <deque>
#include <fstream>
#include <limits>
#include <unordered_map>

#include "trailnav/error.hpp"

namespace trailnav
{

void PlanConfig::validate() const
{
  if (!(traversability_weight >= 0.0) || !std::isfinite(traversability_weight)) {
    throw ParamError("traversability weight must be finite and >= 0");
  }
  if (!(step_size > 0.0)) {
    throw ParamError("step_size must be positive");
  }
  if (!(neighbor_radius > 0.0)) {
    throw ParamError("neighbor_radius must be positive");
  }
  if (!(goal_tolerance > 0.0)) {
    throw ParamError("goal_tolerance must be positive");
  }
  if (!(goal_bias >= 0.0 && goal_bias <= 1.0)) {
    throw ParamError("goal_bias must lie in [0, 1]");
  }
  if (!(interp_radius > 0.0) || !(edge_resolution > 0.0) || !(clearance >= 0.0)) {
    throw ParamError("interp_radius and edge_resolution must be positive, clearance non-negative");
  }
}

namespace
{

KdTree build_tree(const MapSnapshot & map)
{
  if (!map || map->empty()) {
    throw NoTraversableSpace("traversability map is empty");
  }
  return KdTree(map->points);
}

std::optional<KdTree> build_blocked(const MapSnapshot & map, double clearance)
{
  if (clearance <= 0.0) {
    return std::nullopt;
  }
  std::vector<Point3> blocked;
  for (std::size_t i = 0; i < map->size(); ++i) {
    if (map->traversability[i] <= 0.0) {
      // Ground-plane distance: a blocked point overhead or on top of an
      // obstacle blocks the robot just the same.
      blocked.emplace_back(map->points[i].x(), map->points[i].y(), 0.0);
    }
  }
  if (blocked.empty()) {
    return std::nullopt;
  }
  return KdTree(blocked);
}

}  // namespace

TraversabilityField::TraversabilityField(MapSnapshot map, double interp_radius, double clearance)
: map_(std::move(map)),
  tree_(build_tree(map_)),
  blocked_(build_blocked(map_, clearance)),
  interp_radius_(interp_radius),
  clearance_(clearance)
{
}

double TraversabilityField::at(const Point3 & p) const
{
  const Neighbor nn = tree_.nearest(p);
  return nn.distance <= interp_radius_ ? map_->traversability[nn.index] : 0.0;
}

bool TraversabilityField::admissible(const Point3 & p) const
{
  if (at(p) <= 0.0) {
    return false;
  }
  return !blocked_ || blocked_->nearest(Point3(p.x(), p.y(), 0.0)).distance >= clearance_;
}

bool TraversabilityField::segment_free(const Point3 & a, const Point3 & b, double resolution) const
{
  const double len = (b - a).norm();
  const auto n = static_cast<std::size_t>(std::ceil(len / resolution));
  for (std::size_t i = 0; i <= n; ++i) {
    const Point3 p = n == 0 ? a : Point3(a + (b - a) * (static_cast<double>(i) / static_cast<double>(n)));
    if (!admissible(p)) {
      return false;
    }
  }
  return true;
}

TraversabilitySampler::TraversabilitySampler(MapSnapshot map)
: map_(std::move(map))
{
  if (!map_ || map_->empty()) {
    throw NoTraversableSpace("traversability map is empty");
  }
  cumulative_.reserve(map_->size());
  double total = 0.0;
  for (double t : map_->traversability) {
    total += t;
    cumulative_.push_back(total);
  }
  if (!(total > 0.0)) {
    throw NoTraversableSpace("no map point has positive traversability");
  }
}

std::size_t TraversabilitySampler::sample_index(Rng & rng) const
{
  const double u = uniform01(rng) * cumulative_.back();
  const auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), u);
  return std::min(static_cast<std::size_t>(it - cumulative_.begin()), cumulative_.size() - 1);
}

Point3 sample_candidate(const TraversabilitySampler & sampler, const Point3 & goal, double goal_bias, Rng & rng)
{
  if (uniform01(rng) < goal_bias) {
    return goal;
  }
  return sampler.sample(rng);
}

double edge_cost(double parent_t, double child_t, double distance, double weight)
{
  if (!(parent_t > 0.0) || !(child_t > 0.0)) {
    throw CollisionSpace("edge endpoint lies in collision space (T = 0)");
  }
  const double penalty = (parent_t == 1.0 && child_t == 1.0) ? 0.0 : weight / ((parent_t + child_t) / 2.0);
  return distance + penalty;
}

double edge_cost(const TreeNode & parent, const Point3 & child_position, double child_t, double weight)
{
  return edge_cost(parent.traversability, child_t, (child_position - parent.position).norm(), weight);
}

namespace
{

constexpr double kImprovementEps = 1e-9;

/// Uniform hash grid over tree nodes for radius queries.
class NodeGrid
{
public:
  explicit NodeGrid(double cell) : cell_(cell) {}

  void insert(const Point3 & p, std::size_t id) {cells_[key(p)].push_back(id);}

  /// Indices within radius (<= cell size), ascending.
  void within(std::span<const TreeNode> nodes, const Point3 & p, double radius, std::vector<std::size_t> & out) const
  {
    out.clear();
    const auto k = key(p);
    const double r2 = radius * radius;
    for (std::int64_t dx = -1; dx <= 1; ++dx) {
      for (std::int64_t dy = -1; dy <= 1; ++dy) {
        for (std::int64_t dz = -1; dz <= 1; ++dz) {
          const auto it = cells_.find(Key{k.x + dx, k.y + dy, k.z + dz});
          if (it == cells_.end()) {
            continue;
          }
          for (std::size_t id : it->second) {
            if (KdTree::squared_distance(nodes[id].position, p) <= r2) {
              out.push_back(id);
            }
          }
        }
      }
    }
    std::sort(out.begin(), out.end());
  }

private:
  struct Key
  {
    std::int64_t x, y, z;
    bool operator==(const Key &) const = default;
  };
  struct Hash
  {
    std::size_t operator()(const Key & k) const noexcept
    {
      return static_cast<std::size_t>(
        (static_cast<std::uint64_t>(k.x) * 73856093ull) ^ (static_cast<std::uint64_t>(k.y) * 19349663ull) ^
        (static_cast<std::uint64_t>(k.z) * 83492791ull));
    }
  };

  Key key(const Point3 & p) const
  {
    return {static_cast<std::int64_t>(std::floor(p.x() / cell_)),
      static_cast<std::int64_t>(std::floor(p.y() / cell_)),
      static_cast<std::int64_t>(std::floor(p.z() / cell_))};
  }

  double cell_;
  std::unordered_map<Key, std::vector<std::size_t>, Hash> cells_;
};

class RrtStar
{
public:
  RrtStar(const TraversabilityField & field, const PlanConfig & config)
  : field_(field), config_(config), grid_(config.neighbor_radius) {}

  std::vector<TreeNode> nodes;

  void add_root(const Point3 & start, double t)
  {
    nodes.push_back({start, -1, 0.0, t});
    children_.emplace_back();
    grid_.insert(start, 0);
  }

  std::size_t nearest(const Point3 & p) const
  {
    std::size_t best = 0;
    double best_d2 = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < nodes.size(); ++i) {
      const double d2 = KdTree::squared_distance(nodes[i].position, p);
      if (d2 < best_d2) {
        best_d2 = d2;
        best = i;
      }
    }
    return best;
  }

  double cost_via(std::size_t parent, const Point3 & p, double t) const
  {
    return nodes[parent].cost + edge_cost(nodes[parent], p, t, config_.traversability_weight);
  }

  /// Returns the new node index or nullopt when nothing connects.
  std::optional<std::size_t> extend(const Point3 & candidate)
  {
    const std::size_t near = nearest(candidate);
    const Point3 & from = nodes[near].position;
    const double d = (candidate - from).norm();
    if (d == 0.0) {
      return std::nullopt;
    }
    const Point3 x_new = d > config_.step_size ? Point3(from + (candidate - from) * (config_.step_size / d)) : candidate;
    if (!field_.admissible(x_new)) {
      return std::nullopt;
    }
    const double t_new = field_.at(x_new);

    grid_.within(nodes, x_new, config_.neighbor_radius, scratch_);
    if (std::find(scratch_.begin(), scratch_.end(), near) == scratch_.end()) {
      scratch_.insert(std::upper_bound(scratch_.begin(), scratch_.end(), near), near);
    }
    std::vector<std::pair<double, std::size_t>> options;
    options.reserve(scratch_.size());
    for (std::size_t nb : scratch_) {
      if (KdTree::squared_distance(nodes[nb].position, x_new) == 0.0) {
        return std::nullopt;  // already in the tree
      }
      options.emplace_back(cost_via(nb, x_new, t_new), nb);
    }
    std::sort(options.begin(), options.end());
    std::optional<std::size_t> parent;
    double cost = 0.0;
    for (const auto & [c, nb] : options) {
      if (field_.segment_free(nodes[nb].position, x_new, config_.edge_resolution)) {
        parent = nb;
        cost = c;
        break;
      }
    }
    if (!parent) {
      return std::nullopt;
    }
    const std::size_t id = nodes.size();
    nodes.push_back({x_new, static_cast<std::int64_t>(*parent), cost, t_new});
    children_.emplace_back();
    children_[*parent].push_back(id);
    grid_.insert(x_new, id);

    const std::vector<std::size_t> neighbors = scratch_;
    queue_.clear();
    for (std::size_t nb : neighbors) {
      try_rewire(id, nb);
    }
    drain();
    return id;
  }

private:
  void try_rewire(std::size_t via, std::size_t target)
  {
    if (target == via || nodes[via].parent == static_cast<std::int64_t>(target) || target == 0) {
      return;
    }
    const double candidate = cost_via(via, nodes[target].position, nodes[target].traversability);
    if (!(candidate < nodes[target].cost - kImprovementEps)) {
      return;
    }
    if (!field_.segment_free(nodes[via].position, nodes[target].position, config_.edge_resolution)) {
      return;
    }
    reparent(target, via);
  }

  void reparent(std::size_t node, std::size_t new_parent)
  {
    auto & siblings = children_[static_cast<std::size_t>(nodes[node].parent)];
    siblings.erase(std::find(siblings.begin(), siblings.end(), node));
    children_[new_parent].push_back(node);
    nodes[node].parent = static_cast<std::int64_t>(new_parent);

    // Recompute the subtree exactly as an independent walk would.
    std::vector<std::size_t> stack{node};
    while (!stack.empty()) {
      const std::size_t n = stack.back();
      stack.pop_back();
      const std::size_t p = static_cast<std::size_t>(nodes[n].parent);
      const double updated = cost_via(p, nodes[n].position, nodes[n].traversability);
      // Never let a rewire raise a cost.
      if (updated > nodes[n].cost) {
        throw std::logic_error("rewire increased a node cost");
      }
      nodes[n].cost = updated;
      queue_.push_back(n);
      for (std::size_t c : children_[n]) {
        stack.push_back(c);
      }
    }
  }

  void drain()
  {
    std::vector<std::size_t> nbrs;
    while (!queue_.empty()) {
      const std::size_t u = queue_.front();
      queue_.pop_front();
      grid_.within(nodes, nodes[u].position, config_.neighbor_radius, nbrs);
      for (std::size_t v : nbrs) {
        try_rewire(u, v);
      }
    }
  }

  const TraversabilityField & field_;
  const PlanConfig & config_;
  NodeGrid grid_;
  std::vector<std::vector<std::size_t>> children_;
  std::vector<std::size_t> scratch_;
  std::deque<std::size_t> queue_;
};

}  // namespace

PlanResult plan(const TraversabilityField & field, const TraversabilitySampler & sampler,
  const Point3 & start, const Point3 & goal, const PlanConfig & config)
{
  config.validate();
  if (!is_finite(start) || !is_finite(goal)) {
    throw NonFiniteInput("start and goal must be finite");
  }
  const double t_start = field.at(start);
  if (!(t_start > 0.0)) {
    throw NoTraversableSpace("start position lies in collision space");
  }

  RrtStar rrt(field, config);
  rrt.add_root(start, t_start);

  PlanResult result;
  if ((start - goal).norm() <= config.goal_tolerance) {
    result.success = true;
    result.waypoints.push_back({start, 0.0});
    result.node_path.push_back(0);
    result.tree = std::move(rrt.nodes);
    return result;
  }

  Rng rng(config.rng_seed);
  for (std::size_t it = 0; it < config.max_iterations; ++it) {
    rrt.extend(sample_candidate(sampler, goal, config.goal_bias, rng));
    result.iterations = it + 1;
  }

  std::optional<std::size_t> best;
  for (std::size_t i = 0; i < rrt.nodes.size(); ++i) {
    if ((rrt.nodes[i].position - goal).norm() <= config.goal_tolerance &&
      (!best || rrt.nodes[i].cost < rrt.nodes[*best].cost))
    {
      best = i;
    }
  }
  result.tree = std::move(rrt.nodes);
  if (best) {
    result.success = true;
    result.waypoints = extract_waypoints(result.tree, *best, config.step_size, &result.node_path);
    result.total_cost = result.tree[*best].cost;
  }
  return result;
}

PlanResult plan(MapSnapshot map, const Point3 & start, const Point3 & goal, const PlanConfig & config)
{
  config.validate();
  const TraversabilitySampler sampler(map);
  const TraversabilityField field(std::move(map), config.interp_radius, config.clearance);
  return plan(field, sampler, start, goal, config);
}

std::vector<Waypoint> extract_waypoints(std::span<const TreeNode> tree, std::size_t node, double max_spacing,
  std::vector<std::size_t> * node_path)
{
  if (node >= tree.size()) {
    throw InputError("node index outside the tree");
  }
  std::vector<std::size_t> chain;
  for (std::int64_t n = static_cast<std::int64_t>(node); n >= 0; n = tree[static_cast<std::size_t>(n)].parent) {
    chain.push_back(static_cast<std::size_t>(n));
  }
  std::reverse(chain.begin(), chain.end());

  std::vector<Waypoint> out;
  out.push_back({tree[chain.front()].position, tree[chain.front()].cost});
  for (std::size_t i = 1; i < chain.size(); ++i) {
    const TreeNode & a = tree[chain[i - 1]];
    const TreeNode & b = tree[chain[i]];
    const double len = (b.position - a.position).norm();
    const auto pieces = std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(len / max_spacing)));
    for (std::size_t k = 1; k < pieces; ++k) {
      const double f = static_cast<double>(k) / static_cast<double>(pieces);
      out.push_back({a.position + (b.position - a.position) * f, a.cost + (b.cost - a.cost) * f});
    }
    out.push_back({b.position, b.cost});
  }
  if (node_path) {
    *node_path = std::move(chain);
  }
  return out;
}

std::size_t best_frontier_node(std::span<const TreeNode> tree, const Point3 & goal, double cost_to_go_per_meter,
  double min_distance)
{
  if (tree.empty()) {
    throw InputError("empty tree");
  }
  auto pick = [&](double reach) {
      std::optional<std::size_t> best;
      double best_score = std::numeric_limits<double>::infinity();
      for (std::size_t i = 0; i < tree.size(); ++i) {
        if ((tree[i].position - tree[0].position).norm() < reach) {
          continue;
        }
        const double score = tree[i].cost + cost_to_go_per_meter * (tree[i].position - goal).norm();
        if (score < best_score) {
          best_score = score;
          best = i;
        }
      }
      return best;
    };
  if (min_distance > 0.0) {
    if (const auto far = pick(min_distance)) {
      return *far;
    }
  }
  return *pick(0.0);
}

double path_cost(std::span<const TreeNode> tree, std::span<const std::size_t> node_path, double weight)
{
  double c = 0.0;
  for (std::size_t i = 1; i < node_path.size(); ++i) {
    const TreeNode & a = tree[node_path[i - 1]];
    const TreeNode & b = tree[node_path[i]];
    c += edge_cost(a.traversability, b.traversability, (b.position - a.position).norm(), weight);
  }
  return c;
}

Point3 next_waypoint(std::span<const Waypoint> waypoints, const Point3 & robot, double lookahead,
  double corridor_tolerance)
{
  if (waypoints.empty()) {
    throw InputError("path has no waypoints");
  }
  if (waypoints.size() == 1) {
    if ((robot - waypoints.front().position).norm() > corridor_tolerance) {
      throw ReplanRequired("robot left the path corridor");
    }
    return waypoints.front().position;
  }

  std::vector<double> arc(waypoints.size(), 0.0);
  for (std::size_t i = 1; i < waypoints.size(); ++i) {
    arc[i] = arc[i - 1] + (waypoints[i].position - waypoints[i - 1].position).norm();
  }
  double best_d = std::numeric_limits<double>::infinity();
  double best_s = 0.0;
  for (std::size_t i = 0; i + 1 < waypoints.size(); ++i) {
    const Point3 & a = waypoints[i].position;
    const Point3 seg = waypoints[i + 1].position - a;
    const double len2 = seg.squaredNorm();
    const double f = len2 > 0.0 ? std::clamp((robot - a).dot(seg) / len2, 0.0, 1.0) : 0.0;
    const double d = (robot - (a + seg * f)).norm();
    if (d < best_d) {
      best_d = d;
      best_s = arc[i] + f * std::sqrt(len2);
    }
  }
  if (best_d > corridor_tolerance) {
    throw ReplanRequired("robot left the path corridor");
  }
  const double target = best_s + lookahead;
  for (std::size_t i = 0; i < waypoints.size(); ++i) {
    if (arc[i] >= target) {
      return waypoints[i].position;
    }
  }
  return waypoints.back().position;
}

Point3 next_waypoint(const PlanResult & result, const Point3 & robot, double lookahead, double corridor_tolerance)
{
  return next_waypoint(std::span<const Waypoint>(result.waypoints), robot, lookahead, corridor_tolerance);
}

namespace
{
std::ofstream open_csv(const std::filesystem::path & path)
{
  std::ofstream out(path);
  if (!out) {
    throw InputError("cannot open " + path.string() + " for writing");
  }
  return out;
}
}  // namespace

void write_waypoints_csv(const std::filesystem::path & path, std::span<const Waypoint> waypoints)
{
  auto out = open_csv(path);
  out << "x,y,z,cumulative_cost\n";
  char buf[160];
  for (const auto & w : waypoints) {
    std::snprintf(buf, sizeof(buf), "%.9g,%.9g,%.9g,%.9g\n", w.position.x(), w.position.y(), w.position.z(), w.cost);
    out << buf;
  }
}

void write_tree_csv(const std::filesystem::path & path, std::span<const TreeNode> tree)
{
  auto out = open_csv(path);
  out << "parent_index,x,y,z,c,T\n";
  char buf[200];
  for (const auto & n : tree) {
    std::snprintf(buf, sizeof(buf), "%lld,%.9g,%.9g,%.9g,%.9g,%.9g\n", static_cast<long long>(n.parent),
      n.position.x(), n.position.y(), n.position.z(), n.cost, n.traversability);
    out << buf;
  }
}

}  // namespace trailnav
