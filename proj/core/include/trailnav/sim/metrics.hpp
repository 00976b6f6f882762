#ifndef TRAILNAV_SIM_METRICS_HPP
#define TRAILNAV_SIM_METRICS_HPP

#include <span>

#include "trailnav/geometry.hpp"
#include "trailnav/sim/world.hpp"

namespace trailnav::sim
{

struct TrajectorySample
{
  Point3 position;
  double time = 0.0;
};

struct RunMetrics
{
  double time_to_traverse = 0.0;
  double distance_traveled = 0.0;
  /// Percent of arc length over ground-truth trail cells, in [0, 100].
  double pct_on_trail = 0.0;
  bool success = false;
};

/// distance = sum of ground-plane segment lengths, time = last - first stamp.
/// Each segment is split into pieces no longer than a quarter cell and each
/// piece counts as on-trail when its midpoint's cell is trail. A trajectory
/// with zero length scores 0 %. `success` is left false for the caller.
///
/// Throws InputError for an empty or time-unsorted trajectory.
RunMetrics score_run(const WorldModel & world, std::span<const TrajectorySample> trajectory);

}  // namespace trailnav::sim

#endif  // TRAILNAV_SIM_METRICS_HPP
