#pragma once

#include <optional>
#include <vector>

#include "marlot/geometry.hpp"
#include "marlot/maneuver.hpp"
#include "marlot/sim/road.hpp"

namespace marlot::sim {

struct SimParams {
  double dt = 0.1;
  double v_max = 22.0;
  double a_acc = 2.5;
  double a_dec = 2.0;
  double a_brk = 6.0;
  double v_min = 2.0;  // decelerate floor for surrounding vehicles
  double lane_change_duration = 1.5;
  double vehicle_length = 4.8;
  double vehicle_width = 1.9;
  double reverse_accel = 1.0;
  double reverse_v_max = 2.0;
};

/// In-flight lateral blend between lane centers. `target_lane < 0` marks an
/// off-road swerve (no adjacent lane exists; ego only).
struct LaneChangePlan {
  bool active = false;
  int target_lane = -1;
  double dir = 0.0;  // +1 left, -1 right
  double d_start = 0.0;
  double elapsed = 0.0;
  double duration = 1.5;
};

struct VehicleState {
  int id = 0;
  geom::Vec2 position;
  double heading = 0.0;
  double speed = 0.0;  // may dip below zero for the ego while reversing
  int lane_id = 0;
  double s = 0.0;
  double d = 0.0;
  double length = 4.8;
  double width = 1.9;
  LaneChangePlan lane_change;
  bool crashed = false;  // crashed vehicles freeze in place as obstacles

  geom::Obb footprint() const {
    return geom::Obb{position, heading, length, width};
  }
};

struct WorldState {
  VehicleState ego;
  std::vector<VehicleState> surrounding;
  long step = 0;
  double dt = 0.1;

  const VehicleState& vehicle(int id) const;
  std::vector<const VehicleState*> all() const;
};

/// Places a vehicle on a lane at (s, d), synchronizing the world pose.
VehicleState place_vehicle(int id, const RoadNetwork& net, int lane_id, double s,
                           double d, double speed, const SimParams& params);

struct StepOutcome {
  VehicleState state;
  bool degraded_lane_change = false;  // illegal change demoted to Decelerate
};

/// Advances a surrounding vehicle by one step under a discrete maneuver.
/// Lane changes run as a fixed-duration cubic lateral blend at constant
/// speed; an illegal change (no adjacent lane) degrades to Decelerate.
StepOutcome step_vehicle(const VehicleState& state, Maneuver maneuver,
                         const RoadNetwork& net, const SimParams& params);

enum class LaneIntent { Keep, Left, Right, Reverse, Stop };

struct SutDecision {
  double accel = 0.0;
  LaneIntent intent = LaneIntent::Keep;
};

/// Advances the ego. Unlike surrounding vehicles the ego is deliberately not
/// protected from itself: a Left intent on the leftmost lane swerves off the
/// corridor, Reverse drives the speed negative.
VehicleState step_ego(const VehicleState& state, const SutDecision& decision,
                      const RoadNetwork& net, const SimParams& params);

}  // namespace marlot::sim
