#ifndef TRAILNAV_KDTREE_HPP
#define TRAILNAV_KDTREE_HPP

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "trailnav/geometry.hpp"

namespace trailnav
{

struct Neighbor
{
  std::size_t index;
  double distance;
};

/// Balanced 3-d tree over a fixed point set.
///
/// Nodes split on the axis of largest extent at the median point. Every query
/// is exact: results are identical to a linear scan, with equidistant
/// candidates ordered by lowest point index. Squared distances are evaluated
/// as dx*dx + dy*dy + dz*dz so exact ties survive floating point.
class KdTree
{
public:
  /// Throws EmptyInput on an empty set and NonFiniteInput on NaN/Inf.
  explicit KdTree(std::span<const Point3> points);
  explicit KdTree(const PointCloud & cloud) : KdTree(cloud.points()) {}

  std::size_t size() const {return points_.size();}
  const Point3 & point(std::size_t i) const {return points_[i];}
  std::span<const Point3> points() const {return points_;}

  Neighbor nearest(const Point3 & query) const;

  /// Up to k neighbors sorted by (distance, index). `exclude` removes one
  /// index from consideration (use it to skip the query point itself).
  std::vector<Neighbor> k_nearest(const Point3 & query, std::size_t k,
    std::size_t exclude = kNoExclude) const;

  /// All indices with distance <= radius, in ascending index order.
  std::vector<std::size_t> radius_search(const Point3 & query, double radius) const;

  /// Visits every index within radius without allocating; order unspecified.
  template<typename Fn>
  void for_each_in_radius(const Point3 & query, double radius, Fn && fn) const
  {
    if (!nodes_.empty()) {
      visit_radius(0, query, radius * radius, fn);
    }
  }

  static constexpr std::size_t kNoExclude = static_cast<std::size_t>(-1);

private:
  struct Node
  {
    std::uint32_t begin;
    std::uint32_t end;
    std::int32_t left = -1;
    std::int32_t right = -1;
    int axis = -1;
    double split = 0.0;
  };

  static constexpr std::uint32_t kLeafSize = 8;

  std::int32_t build(std::uint32_t begin, std::uint32_t end);
  void search_nearest(std::int32_t node, const Point3 & q, double & best_d2, std::size_t & best) const;

  template<typename Fn>
  void visit_radius(std::int32_t id, const Point3 & q, double r2, Fn & fn) const
  {
    const Node & node = nodes_[static_cast<std::size_t>(id)];
    if (node.axis < 0) {
      for (std::uint32_t i = node.begin; i < node.end; ++i) {
        const std::size_t idx = order_[i];
        if (squared_distance(points_[idx], q) <= r2) {
          fn(idx);
        }
      }
      return;
    }
    const double diff = q[node.axis] - node.split;
    if (diff <= 0.0 || diff * diff <= r2) {
      visit_radius(node.left, q, r2, fn);
    }
    if (diff >= 0.0 || diff * diff <= r2) {
      visit_radius(node.right, q, r2, fn);
    }
  }

public:
  static double squared_distance(const Point3 & a, const Point3 & b)
  {
    const double dx = a.x() - b.x();
    const double dy = a.y() - b.y();
    const double dz = a.z() - b.z();
    return dx * dx + dy * dy + dz * dz;
  }

private:
  std::vector<Point3> points_;
  std::vector<std::uint32_t> order_;
  std::vector<Node> nodes_;
};

}  // namespace trailnav

#endif  // TRAILNAV_KDTREE_HPP
