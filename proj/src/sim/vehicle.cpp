#include "marlot/sim/vehicle.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace marlot::sim {

namespace {

double smoothstep(double u) { return u * u * (3.0 - 2.0 * u); }

// Recomputes world pose from the frenet state; heading blends the lane
// tangent with the lateral rate so mid-change vehicles point into the gap.
void sync_pose(VehicleState& v, const RoadNetwork& net, double lateral_rate) {
  const auto& lane = net.lane_by_id(v.lane_id);
  v.position = lane.center.offset_point(v.s, v.d);
  const geom::Vec2 tan = lane.center.tangent_at(v.s);
  if (std::abs(v.speed) > 0.1) {
    const geom::Vec2 vel = tan * v.speed + tan.left() * lateral_rate;
    if (v.speed > 0.0) {
      v.heading = std::atan2(vel.y, vel.x);
    } else {
      v.heading = std::atan2(tan.y, tan.x);  // reversing keeps nose forward
    }
  }
}

// On blend completion, re-project onto the target lane so s stays exact on
// curved roads where adjacent lanes have different arc lengths.
void finish_lane_change(VehicleState& v, const RoadNetwork& net) {
  const int target = v.lane_change.target_lane;
  v.lane_change = LaneChangePlan{};
  if (target < 0) {
    // off-road swerve: keep the reference lane, stay at the blended offset
    return;
  }
  const auto& lane = net.lane_by_id(target).center;
  const geom::Vec2 world =
      net.lane_by_id(v.lane_id).center.offset_point(v.s, v.d);
  const auto proj = lane.project(world, v.s);
  v.lane_id = target;
  v.s = proj.s;
  v.d = proj.d;
}

void advance_blend(VehicleState& v, const RoadNetwork& net, double dt,
                   double* lateral_rate) {
  auto& lc = v.lane_change;
  const double prev_d = v.d;
  lc.elapsed += dt;
  const double tau = std::min(1.0, lc.elapsed / lc.duration);
  v.d = lc.d_start + (lc.dir * net.lane_width - lc.d_start) * smoothstep(tau);
  *lateral_rate = (v.d - prev_d) / dt;
  if (tau >= 1.0) finish_lane_change(v, net);
}

}  // namespace

const VehicleState& WorldState::vehicle(int id) const {
  if (ego.id == id) return ego;
  for (const auto& sv : surrounding) {
    if (sv.id == id) return sv;
  }
  throw std::out_of_range("unknown vehicle id");
}

std::vector<const VehicleState*> WorldState::all() const {
  std::vector<const VehicleState*> out;
  out.push_back(&ego);
  for (const auto& sv : surrounding) out.push_back(&sv);
  return out;
}

VehicleState place_vehicle(int id, const RoadNetwork& net, int lane_id, double s,
                           double d, double speed, const SimParams& params) {
  VehicleState v;
  v.id = id;
  v.lane_id = lane_id;
  v.s = s;
  v.d = d;
  v.speed = speed;
  v.length = params.vehicle_length;
  v.width = params.vehicle_width;
  const auto& lane = net.lane_by_id(lane_id);
  v.position = lane.center.offset_point(s, d);
  const geom::Vec2 tan = lane.center.tangent_at(s);
  v.heading = std::atan2(tan.y, tan.x);
  return v;
}

StepOutcome step_vehicle(const VehicleState& state, Maneuver maneuver,
                         const RoadNetwork& net, const SimParams& params) {
  StepOutcome out;
  out.state = state;
  VehicleState& v = out.state;
  if (v.crashed) return out;

  const double dt = params.dt;
  Maneuver effective = maneuver;

  // Legality: a lane change needs an adjacent lane and no blend in flight.
  // Re-issuing a change mid-blend is a no-op (the blend continues at
  // constant speed).
  if (effective == Maneuver::LeftLaneChange ||
      effective == Maneuver::RightLaneChange) {
    if (!v.lane_change.active) {
      const bool left = maneuver == Maneuver::LeftLaneChange;
      const auto target = left ? net.left_of(v.lane_id) : net.right_of(v.lane_id);
      if (!target.has_value()) {
        effective = Maneuver::Decelerate;
        out.degraded_lane_change = true;
      } else {
        v.lane_change.active = true;
        v.lane_change.target_lane = *target;
        v.lane_change.dir = left ? 1.0 : -1.0;
        v.lane_change.d_start = v.d;
        v.lane_change.elapsed = 0.0;
        v.lane_change.duration = params.lane_change_duration;
      }
    }
  }

  switch (effective) {
    case Maneuver::Accelerate:
      v.speed = std::min(params.v_max, v.speed + params.a_acc * dt);
      break;
    case Maneuver::Decelerate:
      // Never drives the speed below V_min; a vehicle already slower than
      // V_min simply holds its speed.
      v.speed = std::max(v.speed - params.a_dec * dt,
                         std::min(v.speed, params.v_min));
      break;
    case Maneuver::Brake:
      v.speed = std::max(0.0, v.speed - params.a_brk * dt);
      break;
    case Maneuver::LeftLaneChange:
    case Maneuver::RightLaneChange:
      break;  // constant speed during the blend
  }

  v.s += v.speed * dt;
  const double lane_len = net.lane_by_id(v.lane_id).center.length();
  v.s = std::clamp(v.s, 0.0, lane_len);

  double lateral_rate = 0.0;
  if (v.lane_change.active) {
    advance_blend(v, net, dt, &lateral_rate);
  }
  sync_pose(v, net, lateral_rate);
  return out;
}

VehicleState step_ego(const VehicleState& state, const SutDecision& decision,
                      const RoadNetwork& net, const SimParams& params) {
  VehicleState v = state;
  if (v.crashed) return v;
  const double dt = params.dt;

  switch (decision.intent) {
    case LaneIntent::Reverse:
      v.speed = std::max(v.speed - params.reverse_accel * dt, -params.reverse_v_max);
      break;
    case LaneIntent::Stop:
      if (v.speed > 0.0) {
        v.speed = std::max(0.0, v.speed - params.a_brk * dt);
      } else {
        v.speed = std::min(0.0, v.speed + params.a_brk * dt);
      }
      break;
    default:
      v.speed += decision.accel * dt;
      v.speed = std::clamp(v.speed, 0.0, params.v_max);
      break;
  }

  if (!v.lane_change.active && (decision.intent == LaneIntent::Left ||
                                decision.intent == LaneIntent::Right)) {
    const bool left = decision.intent == LaneIntent::Left;
    const auto target = left ? net.left_of(v.lane_id) : net.right_of(v.lane_id);
    v.lane_change.active = true;
    v.lane_change.target_lane = target.value_or(-1);
    v.lane_change.dir = left ? 1.0 : -1.0;
    v.lane_change.d_start = v.d;
    v.lane_change.elapsed = 0.0;
    v.lane_change.duration = params.lane_change_duration;
  }

  v.s += v.speed * dt;
  const double lane_len = net.lane_by_id(v.lane_id).center.length();
  v.s = std::clamp(v.s, 0.0, lane_len);

  double lateral_rate = 0.0;
  if (v.lane_change.active) {
    advance_blend(v, net, dt, &lateral_rate);
  }
  sync_pose(v, net, lateral_rate);
  return v;
}

}  // namespace marlot::sim
