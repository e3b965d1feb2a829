#pragma once

#include <span>

#include "lmap/core.hpp"

namespace lmap {

struct StationaryParams {
  double speed_threshold = 0.2;  // m/s
  double window = 3.0;           // s, centered on the annotation time
};

/// Position of the walker while stopped near `annotation_time`.
///
/// Averages the samples inside the centered window whose forward
/// finite-difference speed is below the threshold. The last sample has no
/// successor and reuses the speed of the segment leading into it. When nothing
/// in the window qualifies the sample nearest in time is returned, so that
/// annotations typed while still walking keep a position.
///
/// Throws InputError for an empty trajectory or bad params and
/// OutOfRangeError when the time lies more than one window outside the
/// trajectory's time span.
Point2d stationary_position(std::span<const TrajectorySample> trajectory,
                            double annotation_time,
                            const StationaryParams& params = {});

}  // namespace lmap
