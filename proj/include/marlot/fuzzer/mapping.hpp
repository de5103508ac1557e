#pragma once

#include "marlot/maneuver.hpp"

namespace marlot::fuzzer {

/// Maps a continuous movement vector to a discrete driving behavior.
/// Lateral thresholds take precedence: |v_x| beyond 0.01 is a lane-change
/// intent regardless of v_y. Longitudinally, v_y in (0.02, ..] accelerates,
/// [0, 0.02] decelerates, negative brakes. Total over all of R^2.
Maneuver map_action_to_maneuver(double vx, double vy);

}  // namespace marlot::fuzzer
