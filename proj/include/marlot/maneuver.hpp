#pragma once

#include <array>
#include <string_view>

namespace marlot {

/// Discrete driving behaviors executable by surrounding vehicles.
enum class Maneuver {
  Accelerate,
  Decelerate,
  Brake,
  LeftLaneChange,
  RightLaneChange,
};

inline constexpr std::array<Maneuver, 5> kAllManeuvers = {
    Maneuver::Accelerate, Maneuver::Decelerate, Maneuver::Brake,
    Maneuver::LeftLaneChange, Maneuver::RightLaneChange};

inline constexpr std::string_view to_string(Maneuver m) {
  switch (m) {
    case Maneuver::Accelerate: return "accelerate";
    case Maneuver::Decelerate: return "decelerate";
    case Maneuver::Brake: return "brake";
    case Maneuver::LeftLaneChange: return "left_lane_change";
    case Maneuver::RightLaneChange: return "right_lane_change";
  }
  return "unknown";
}

}  // namespace marlot
