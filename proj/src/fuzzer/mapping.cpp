#include "marlot/fuzzer/mapping.hpp"

namespace marlot::fuzzer {

Maneuver map_action_to_maneuver(double vx, double vy) {
  if (vx < -0.01) return Maneuver::LeftLaneChange;
  if (vx > 0.01) return Maneuver::RightLaneChange;
  if (vy < 0.0) return Maneuver::Brake;
  if (vy <= 0.02) return Maneuver::Decelerate;
  return Maneuver::Accelerate;
}

}  // namespace marlot::fuzzer
