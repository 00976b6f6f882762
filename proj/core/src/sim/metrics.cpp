#include "trailnav/sim/metrics.hpp"

#include <algorithm>
#include <cmath>

#include "trailnav/error.hpp"

namespace trailnav::sim
{

RunMetrics score_run(const WorldModel & world, std::span<const TrajectorySample> trajectory)
{
  if (trajectory.empty()) {
    throw InputError("trajectory is empty");
  }
  for (std::size_t i = 1; i < trajectory.size(); ++i) {
    if (!(trajectory[i].time >= trajectory[i - 1].time)) {
      throw InputError("trajectory timestamps are not sorted");
    }
  }
  RunMetrics m;
  m.time_to_traverse = trajectory.back().time - trajectory.front().time;
  const double piece = world.resolution / 4.0;
  double on_trail = 0.0;
  for (std::size_t i = 1; i < trajectory.size(); ++i) {
    const Point3 & a = trajectory[i - 1].position;
    const Point3 & b = trajectory[i].position;
    const double len = std::hypot(b.x() - a.x(), b.y() - a.y());
    m.distance_traveled += len;
    if (len == 0.0) {
      continue;
    }
    const auto n = static_cast<std::size_t>(std::ceil(len / piece));
    const double part = len / static_cast<double>(n);
    for (std::size_t k = 0; k < n; ++k) {
      const double f = (static_cast<double>(k) + 0.5) / static_cast<double>(n);
      const double x = a.x() + (b.x() - a.x()) * f;
      const double y = a.y() + (b.y() - a.y()) * f;
      if (world.class_at(x, y) == SemanticClass::trail) {
        on_trail += part;
      }
    }
  }
  if (m.distance_traveled > 0.0) {
    m.pct_on_trail = std::clamp(100.0 * on_trail / m.distance_traveled, 0.0, 100.0);
  }
  return m;
}

}  // namespace trailnav::sim
