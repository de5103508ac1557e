#include "marlot/sut/policy.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace marlot::sut {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// A vehicle occupies a lane when its center projects within half a lane
// width plus half a body width of that lane's centerline. Vehicles mid
// lane-change count in both lanes.
bool occupies(const sim::VehicleState& v, const sim::RoadNetwork& net,
              int lane_id, double* s_on_lane) {
  const auto& lane = net.lane_by_id(lane_id);
  const auto proj = lane.center.project(v.position, v.s);
  *s_on_lane = proj.s;
  const double band = (net.lane_width + v.width) * 0.5 - 0.2;
  return std::abs(proj.d) <= band;
}

std::optional<LaneGap> scan_lane(const sim::WorldState& world,
                                 const sim::RoadNetwork& net, int lane_id,
                                 double ref_s, int exclude_id, bool ahead) {
  std::optional<LaneGap> best;
  for (const auto* v : world.all()) {
    if (v->id == exclude_id) continue;
    double s = 0.0;
    if (!occupies(*v, net, lane_id, &s)) continue;
    const double ds = ahead ? s - ref_s : ref_s - s;
    if (ds <= 0.0) continue;
    const double gap = ds - v->length;  // bumper gap for equal-length bodies
    if (!best || gap < best->gap) {
      best = LaneGap{v->id, gap, v->speed};
    }
  }
  return best;
}

bool side_clear(const sim::WorldState& world, const sim::RoadNetwork& net,
                int lane_id, double ref_s, int exclude_id, double margin) {
  // anything riding alongside blocks the lane outright
  for (const auto* v : world.all()) {
    if (v->id == exclude_id) continue;
    double s = 0.0;
    if (!occupies(*v, net, lane_id, &s)) continue;
    if (std::abs(s - ref_s) < v->length) return false;
  }
  const auto front = scan_lane(world, net, lane_id, ref_s, exclude_id, true);
  const auto rear = scan_lane(world, net, lane_id, ref_s, exclude_id, false);
  if (front && front->gap <= margin) return false;
  if (rear && rear->gap <= margin) return false;
  return true;
}

double side_front_gap(const sim::WorldState& world, const sim::RoadNetwork& net,
                      int lane_id, double ref_s, int exclude_id) {
  const auto front = scan_lane(world, net, lane_id, ref_s, exclude_id, true);
  return front ? front->gap : kInf;
}

}  // namespace

std::optional<LaneGap> nearest_ahead(const sim::WorldState& world,
                                     const sim::RoadNetwork& net, int lane_id,
                                     double ref_s, int exclude_id) {
  return scan_lane(world, net, lane_id, ref_s, exclude_id, true);
}

std::optional<LaneGap> nearest_behind(const sim::WorldState& world,
                                      const sim::RoadNetwork& net, int lane_id,
                                      double ref_s, int exclude_id) {
  return scan_lane(world, net, lane_id, ref_s, exclude_id, false);
}

sim::SutDecision idm_policy_step(const sim::WorldState& world,
                                 const sim::RoadNetwork& net,
                                 const SutConfig& cfg) {
  const auto& ego = world.ego;
  sim::SutDecision decision;

  const auto leader = nearest_ahead(world, net, ego.lane_id, ego.s, ego.id);
  const double gap = leader ? std::max(leader->gap, 0.0) : kInf;
  const double approach = leader ? ego.speed - leader->speed : 0.0;

  const auto accel = idm_acceleration(std::max(ego.speed, 0.0),
                                      leader ? leader->gap : kInf, approach,
                                      cfg.idm);
  decision.accel = accel ? std::clamp(*accel, -cfg.a_brk, cfg.idm.a) : -cfg.a_brk;

  if (ego.lane_change.active) return decision;

  if (leader && leader->speed < cfg.stopped_speed && gap < cfg.sidestep_range) {
    // Sidestep: adjacent lane must be clear ahead and behind.
    const auto left = net.left_of(ego.lane_id);
    const auto right = net.right_of(ego.lane_id);
    const bool left_ok =
        left && side_clear(world, net, *left, ego.s, ego.id, cfg.d_safe);
    const bool right_ok =
        right && side_clear(world, net, *right, ego.s, ego.id, cfg.d_safe);
    if (left_ok && right_ok) {
      const double lg = side_front_gap(world, net, *left, ego.s, ego.id);
      const double rg = side_front_gap(world, net, *right, ego.s, ego.id);
      decision.intent = lg >= rg ? sim::LaneIntent::Left : sim::LaneIntent::Right;
    } else if (left_ok) {
      decision.intent = sim::LaneIntent::Left;
    } else if (right_ok) {
      decision.intent = sim::LaneIntent::Right;
    } else if (gap < cfg.escape_gap && std::abs(ego.speed) < cfg.stopped_speed) {
      // Boxed in and halted: reverse out when the rear is clear, else stop.
      const auto rear = nearest_behind(world, net, ego.lane_id, ego.s, ego.id);
      if (!rear || rear->gap > cfg.reverse_margin) {
        decision.intent = sim::LaneIntent::Reverse;
      } else {
        decision.intent = sim::LaneIntent::Stop;
      }
      decision.accel = -cfg.a_brk;
    } else {
      decision.accel = std::min(decision.accel, -cfg.a_brk);
    }
  }
  return decision;
}

sim::SutDecision heuristic_policy_step(const sim::WorldState& world,
                                       const sim::RoadNetwork& net,
                                       const SutConfig& cfg) {
  const auto& ego = world.ego;
  sim::SutDecision decision;
  decision.accel = std::clamp(cfg.h_gain * (cfg.h_target_speed - ego.speed),
                              -cfg.a_brk, cfg.idm.a);

  const auto leader = nearest_ahead(world, net, ego.lane_id, ego.s, ego.id);
  if (!leader) return decision;
  const double gap = std::max(leader->gap, 0.0);

  if (gap < cfg.h_brake_gap) {
    decision.accel = -cfg.a_brk;
  } else if (gap < cfg.h_headway * std::max(ego.speed, 0.0)) {
    decision.accel = std::min(decision.accel, -2.0);
  }

  if (ego.lane_change.active) return decision;

  if (leader->speed < cfg.stopped_speed && gap < cfg.h_sidestep_gap) {
    // Optimistic sidestep: looks at the front gap only and never checks
    // rear traffic.
    const auto left = net.left_of(ego.lane_id);
    const auto right = net.right_of(ego.lane_id);
    const double lg =
        left ? side_front_gap(world, net, *left, ego.s, ego.id) : -kInf;
    const double rg =
        right ? side_front_gap(world, net, *right, ego.s, ego.id) : -kInf;
    if (lg > cfg.h_sidestep_margin || rg > cfg.h_sidestep_margin) {
      decision.intent =
          lg >= rg ? sim::LaneIntent::Left : sim::LaneIntent::Right;
    } else if (gap < cfg.h_brake_gap) {
      // Desperation swerve toward whichever side has fewer vehicles nearby,
      // lane or no lane. Off the edge lane this leaves the road.
      int left_count = 0, right_count = 0;
      for (const auto& sv : world.surrounding) {
        if (geom::distance(sv.position, ego.position) > 12.0) continue;
        const auto& lane = net.lane_by_id(ego.lane_id);
        const auto proj = lane.center.project(sv.position, ego.s);
        (proj.d > ego.d ? left_count : right_count) += 1;
      }
      if (std::abs(ego.speed) >= cfg.stopped_speed) {
        decision.intent = left_count <= right_count ? sim::LaneIntent::Left
                                                    : sim::LaneIntent::Right;
      } else {
        decision.intent = sim::LaneIntent::Stop;
      }
    }
  }
  return decision;
}

}  // namespace marlot::sut
