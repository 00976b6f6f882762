// Brute-force reference implementations. Deliberately naive: linear scans,
// ordered maps, no shared code with the library beyond the value types.
#ifndef TRAILNAV_TESTS_ORACLES_HPP
#define TRAILNAV_TESTS_ORACLES_HPP

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <tuple>
#include <vector>

#include "trailnav/geometry.hpp"
#include "trailnav/random.hpp"
#include "trailnav/semantic.hpp"

namespace oracle
{

using trailnav::Point3;

inline double dist2(const Point3 & a, const Point3 & b)
{
  const double dx = a.x() - b.x();
  const double dy = a.y() - b.y();
  const double dz = a.z() - b.z();
  return dx * dx + dy * dy + dz * dz;
}

struct Hit
{
  std::size_t index;
  double d2;
};

/// Nearest point, lowest index on ties.
inline Hit nearest(const std::vector<Point3> & pts, const Point3 & q)
{
  Hit best{0, std::numeric_limits<double>::infinity()};
  for (std::size_t i = 0; i < pts.size(); ++i) {
    const double d2 = dist2(pts[i], q);
    if (d2 < best.d2) {
      best = {i, d2};
    }
  }
  return best;
}

/// Full sort by (distance, index), then truncate.
inline std::vector<Hit> k_nearest(const std::vector<Point3> & pts, const Point3 & q, std::size_t k,
  std::size_t exclude = static_cast<std::size_t>(-1))
{
  std::vector<Hit> all;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    if (i != exclude) {
      all.push_back({i, dist2(pts[i], q)});
    }
  }
  std::sort(all.begin(), all.end(), [](const Hit & a, const Hit & b) {
      return std::tie(a.d2, a.index) < std::tie(b.d2, b.index);
    });
  if (all.size() > k) {
    all.resize(k);
  }
  return all;
}

inline std::vector<std::size_t> radius(const std::vector<Point3> & pts, const Point3 & q, double r)
{
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    if (dist2(pts[i], q) <= r * r) {
      out.push_back(i);
    }
  }
  return out;
}

/// Semantic-to-geometric nearest pairs within the cutoff; -1 when unmatched.
inline std::vector<std::int64_t> associate(const std::vector<Point3> & from, const std::vector<Point3> & to,
  double cutoff)
{
  std::vector<std::int64_t> out;
  for (const auto & p : from) {
    const Hit h = nearest(to, p);
    out.push_back(std::sqrt(h.d2) <= cutoff ? static_cast<std::int64_t>(h.index) : -1);
  }
  return out;
}

struct Voxel
{
  Point3 centroid;
  trailnav::SemanticClass label;
};

/// Voxels in order of first occupancy. Centroids sum in input order so the
/// result is bit-comparable; the label is the majority with ties going to
/// the lowest ordinal.
inline std::vector<Voxel> voxelize(const std::vector<Point3> & pts, const std::vector<trailnav::SemanticClass> & labels,
  double s)
{
  using Key = std::tuple<std::int64_t, std::int64_t, std::int64_t>;
  std::map<Key, std::size_t> first;
  std::vector<Key> order;
  std::vector<std::vector<std::size_t>> members;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    const Key k{static_cast<std::int64_t>(std::floor(pts[i].x() / s)),
      static_cast<std::int64_t>(std::floor(pts[i].y() / s)),
      static_cast<std::int64_t>(std::floor(pts[i].z() / s))};
    auto it = first.find(k);
    if (it == first.end()) {
      it = first.emplace(k, members.size()).first;
      members.emplace_back();
    }
    members[it->second].push_back(i);
  }
  std::vector<Voxel> out;
  for (const auto & m : members) {
    Point3 sum = Point3::Zero();
    std::array<std::size_t, trailnav::kNumClasses> votes{};
    for (std::size_t i : m) {
      sum += pts[i];
      ++votes[trailnav::ordinal(labels[i])];
    }
    std::size_t best = 0;
    for (std::size_t c = 0; c < votes.size(); ++c) {
      if (votes[c] > votes[best]) {
        best = c;
      }
    }
    out.push_back({sum / static_cast<double>(m.size()), static_cast<trailnav::SemanticClass>(best)});
  }
  return out;
}

/// Indices kept by statistical outlier removal with population sigma.
inline std::vector<std::size_t> sor_keep(const std::vector<Point3> & pts, std::size_t k, double alpha)
{
  std::vector<double> means;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    double sum = 0.0;
    for (const auto & h : k_nearest(pts, pts[i], k, i)) {
      sum += std::sqrt(h.d2);
    }
    means.push_back(sum / static_cast<double>(k));
  }
  double mu = 0.0;
  for (double m : means) {
    mu += m;
  }
  mu /= static_cast<double>(means.size());
  double var = 0.0;
  for (double m : means) {
    var += (m - mu) * (m - mu);
  }
  const double sigma = std::sqrt(var / static_cast<double>(means.size()));
  std::vector<std::size_t> keep;
  for (std::size_t i = 0; i < means.size(); ++i) {
    if (means[i] >= mu - alpha * sigma && means[i] <= mu + alpha * sigma) {
      keep.push_back(i);
    }
  }
  return keep;
}

/// Path cost d + W / mean(T) per edge, dropping the penalty only when both
/// ends have T exactly 1.
inline double path_cost(const std::vector<Point3> & nodes, const std::vector<double> & t, double w)
{
  double c = 0.0;
  for (std::size_t i = 1; i < nodes.size(); ++i) {
    const double d = std::sqrt(dist2(nodes[i - 1], nodes[i]));
    c += d;
    if (!(t[i - 1] == 1.0 && t[i] == 1.0)) {
      c += w * 2.0 / (t[i - 1] + t[i]);
    }
  }
  return c;
}

/// Random cloud of n points: a mix of uniform scatter and tight clusters so
/// that ties, dense voxels and outliers all occur.
inline std::vector<Point3> random_cloud(trailnav::Rng & rng, std::size_t n, double extent = 2.0)
{
  std::vector<Point3> pts;
  while (pts.size() < n) {
    if (trailnav::uniform01(rng) < 0.3) {
      pts.emplace_back(trailnav::uniform(rng, -extent, extent), trailnav::uniform(rng, -extent, extent),
        trailnav::uniform(rng, -extent, extent));
    } else {
      const Point3 c(trailnav::uniform(rng, -extent, extent), trailnav::uniform(rng, -extent, extent),
        trailnav::uniform(rng, -extent / 4, extent / 4));
      const std::size_t m = 1 + static_cast<std::size_t>(trailnav::uniform01(rng) * 12);
      for (std::size_t j = 0; j < m && pts.size() < n; ++j) {
        pts.push_back(c + 0.05 * Point3(trailnav::normal01(rng), trailnav::normal01(rng), trailnav::normal01(rng)));
      }
    }
  }
  // A few exact duplicates to exercise tie breaking.
  for (std::size_t j = 0; j + 7 < pts.size(); j += 37) {
    pts[j + 7] = pts[j];
  }
  return pts;
}

}  // namespace oracle

#endif  // TRAILNAV_TESTS_ORACLES_HPP
