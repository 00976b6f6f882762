#include "trailnav/kdtree.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>

#include "trailnav/error.hpp"

namespace trailnav
{

KdTree::KdTree(std::span<const Point3> points)
: points_(points.begin(), points.end())
{
  if (points_.empty()) {
    throw EmptyInput("cannot build a k-d tree over an empty point set");
  }
  if (points_.size() >= std::numeric_limits<std::uint32_t>::max()) {
    throw DomainError("point set too large for k-d tree");
  }
  require_finite(points_);
  order_.resize(points_.size());
  for (std::uint32_t i = 0; i < order_.size(); ++i) {
    order_[i] = i;
  }
  nodes_.reserve(2 * points_.size() / kLeafSize + 1);
  build(0, static_cast<std::uint32_t>(points_.size()));
}

std::int32_t KdTree::build(std::uint32_t begin, std::uint32_t end)
{
  const auto id = static_cast<std::int32_t>(nodes_.size());
  nodes_.push_back(Node{begin, end});
  if (end - begin <= kLeafSize) {
    return id;
  }

  Eigen::Vector3d lo = Eigen::Vector3d::Constant(std::numeric_limits<double>::infinity());
  Eigen::Vector3d hi = -lo;
  for (std::uint32_t i = begin; i < end; ++i) {
    lo = lo.cwiseMin(points_[order_[i]]);
    hi = hi.cwiseMax(points_[order_[i]]);
  }
  int axis = 0;
  (hi - lo).maxCoeff(&axis);

  const std::uint32_t mid = begin + (end - begin) / 2;
  auto less = [&](std::uint32_t a, std::uint32_t b) {
      const double ca = points_[a][axis];
      const double cb = points_[b][axis];
      return ca < cb || (ca == cb && a < b);
    };
  std::nth_element(order_.begin() + begin, order_.begin() + mid, order_.begin() + end, less);

  const double split = points_[order_[mid]][axis];
  const std::int32_t left = build(begin, mid);
  const std::int32_t right = build(mid, end);
  Node & node = nodes_[static_cast<std::size_t>(id)];
  node.axis = axis;
  node.split = split;
  node.left = left;
  node.right = right;
  return id;
}

void KdTree::search_nearest(std::int32_t id, const Point3 & q, double & best_d2, std::size_t & best) const
{
  const Node & node = nodes_[static_cast<std::size_t>(id)];
  if (node.axis < 0) {
    for (std::uint32_t i = node.begin; i < node.end; ++i) {
      const std::size_t idx = order_[i];
      const double d2 = squared_distance(points_[idx], q);
      if (d2 < best_d2 || (d2 == best_d2 && idx < best)) {
        best_d2 = d2;
        best = idx;
      }
    }
    return;
  }
  const double diff = q[node.axis] - node.split;
  const std::int32_t near = diff < 0.0 ? node.left : node.right;
  const std::int32_t far = diff < 0.0 ? node.right : node.left;
  search_nearest(near, q, best_d2, best);
  // Equal bound still descends: an equidistant lower index may live there.
  if (diff * diff <= best_d2) {
    search_nearest(far, q, best_d2, best);
  }
}

Neighbor KdTree::nearest(const Point3 & query) const
{
  double best_d2 = std::numeric_limits<double>::infinity();
  std::size_t best = std::numeric_limits<std::size_t>::max();
  search_nearest(0, query, best_d2, best);
  return {best, std::sqrt(best_d2)};
}

std::vector<Neighbor> KdTree::k_nearest(const Point3 & query, std::size_t k, std::size_t exclude) const
{
  std::vector<Neighbor> out;
  if (k == 0) {
    return out;
  }
  using Entry = std::pair<double, std::size_t>;
  // Max-heap on (d2, index): top is the worst kept candidate.
  std::priority_queue<Entry> heap;

  auto consider = [&](std::size_t idx) {
      if (idx == exclude) {
        return;
      }
      const Entry e{squared_distance(points_[idx], query), idx};
      if (heap.size() < k) {
        heap.push(e);
      } else if (e < heap.top()) {
        heap.pop();
        heap.push(e);
      }
    };

  // Iterative descent with an explicit stack, nearest child first.
  std::vector<std::pair<std::int32_t, double>> stack;
  stack.emplace_back(0, 0.0);
  while (!stack.empty()) {
    const auto [id, bound] = stack.back();
    stack.pop_back();
    if (heap.size() == k && bound > heap.top().first) {
      continue;
    }
    const Node & node = nodes_[static_cast<std::size_t>(id)];
    if (node.axis < 0) {
      for (std::uint32_t i = node.begin; i < node.end; ++i) {
        consider(order_[i]);
      }
      continue;
    }
    const double diff = query[node.axis] - node.split;
    const std::int32_t near = diff < 0.0 ? node.left : node.right;
    const std::int32_t far = diff < 0.0 ? node.right : node.left;
    stack.emplace_back(far, std::max(bound, diff * diff));
    stack.emplace_back(near, bound);
  }

  out.resize(heap.size());
  for (std::size_t i = heap.size(); i-- > 0; ) {
    out[i] = Neighbor{heap.top().second, std::sqrt(heap.top().first)};
    heap.pop();
  }
  return out;
}

std::vector<std::size_t> KdTree::radius_search(const Point3 & query, double radius) const
{
  std::vector<std::size_t> out;
  for_each_in_radius(query, radius, [&](std::size_t idx) {out.push_back(idx);});
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace trailnav
