#include "lmap/trajectory.hpp"

#include <cmath>
#include <limits>
#include <string>

namespace lmap {

Point2d stationary_position(std::span<const TrajectorySample> trajectory,
                            double annotation_time, const StationaryParams& params) {
  if (trajectory.empty()) throw InputError("stationary_position: empty trajectory");
  if (!(params.speed_threshold > 0) || !(params.window > 0)) {
    throw InputError("stationary_position: speed_threshold and window must be positive");
  }
  const double first = trajectory.front().t;
  const double last = trajectory.back().t;
  if (!std::isfinite(annotation_time) || annotation_time < first - params.window ||
      annotation_time > last + params.window) {
    throw OutOfRangeError("stationary_position: annotation time " +
                          std::to_string(annotation_time) + " s outside trajectory span [" +
                          std::to_string(first) + ", " + std::to_string(last) + "]");
  }

  auto speed_at = [&](std::size_t i) {
    std::size_t a = i, b = i + 1;
    if (b >= trajectory.size()) {
      if (i == 0) return std::numeric_limits<double>::infinity();
      a = i - 1;
      b = i;
    }
    const double dt = trajectory[b].t - trajectory[a].t;
    const double dist = std::hypot(trajectory[b].x - trajectory[a].x,
                                   trajectory[b].y - trajectory[a].y);
    return dt > 0 ? dist / dt : std::numeric_limits<double>::infinity();
  };

  const double lo = annotation_time - params.window / 2;
  const double hi = annotation_time + params.window / 2;
  Point2d sum = Point2d::Zero();
  std::size_t count = 0;
  for (std::size_t i = 0; i < trajectory.size(); ++i) {
    const auto& s = trajectory[i];
    if (s.t < lo || s.t > hi) continue;
    if (speed_at(i) < params.speed_threshold) {
      sum += Point2d(s.x, s.y);
      ++count;
    }
  }
  if (count > 0) return sum / static_cast<double>(count);

  std::size_t nearest = 0;
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < trajectory.size(); ++i) {
    const double gap = std::abs(trajectory[i].t - annotation_time);
    if (gap < best) {
      best = gap;
      nearest = i;
    }
  }
  return {trajectory[nearest].x, trajectory[nearest].y};
}

}  // namespace lmap
