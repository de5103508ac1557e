#include "marlot/fuzzer/pattern.hpp"

#include <cassert>
#include <cmath>

namespace marlot::fuzzer {

const char* to_string(PatternKind kind) {
  switch (kind) {
    case PatternKind::Ahead: return "ahead";
    case PatternKind::SideFront: return "side_front";
    case PatternKind::Behind: return "behind";
    case PatternKind::SideBehind: return "side_behind";
  }
  return "unknown";
}

RelativePose relative_pose(const sim::VehicleState& sv,
                           const sim::VehicleState& ego,
                           const sim::RoadNetwork& net) {
  RelativePose rel;
  const auto& lane = net.lane_by_id(ego.lane_id).center;
  const auto sv_proj = lane.project(sv.position, sv.s);
  const auto ego_proj = lane.project(ego.position, ego.s);
  rel.ds = sv_proj.s - ego_proj.s;
  rel.gap = std::abs(rel.ds) - 0.5 * (sv.length + ego.length);
  rel.lane_delta = sv.lane_id - ego.lane_id;
  rel.same_lane = rel.lane_delta == 0;
  rel.adjacent = std::abs(rel.lane_delta) == 1;
  return rel;
}

std::optional<PatternKind> classify_trigger(const sim::VehicleState& sv,
                                            const sim::VehicleState& ego,
                                            const sim::RoadNetwork& net,
                                            const FuzzerConfig& cfg) {
  if (sv.crashed) return std::nullopt;
  const RelativePose rel = relative_pose(sv, ego, net);
  if (rel.same_lane) {
    if (rel.ds >= 0.0) {
      if (rel.gap < cfg.d_safe) return PatternKind::Ahead;
      return std::nullopt;
    }
    return PatternKind::Behind;  // any distance; State A closes the gap
  }
  if (rel.adjacent) {
    if (rel.ds >= 0.0) {
      if (rel.gap < cfg.d_safe) return PatternKind::SideFront;
      return std::nullopt;
    }
    if (rel.gap < cfg.side_behind_range) return PatternKind::SideBehind;
  }
  return std::nullopt;
}

namespace {

// Picks a lane-change direction. Wanted side first; if that lane does not
// exist, the other side is substituted.
Maneuver pick_lane_change(const sim::RoadNetwork& net, int lane_id,
                          bool want_left, bool* substituted) {
  const bool left_ok = net.left_of(lane_id).has_value();
  const bool right_ok = net.right_of(lane_id).has_value();
  if (want_left && left_ok) return Maneuver::LeftLaneChange;
  if (!want_left && right_ok) return Maneuver::RightLaneChange;
  *substituted = true;
  return left_ok ? Maneuver::LeftLaneChange : Maneuver::RightLaneChange;
}

bool predicate_holds(StepPredicate pred, const sim::WorldState& world,
                     int sv_index, const sim::RoadNetwork& net,
                     const FuzzerConfig& cfg) {
  const auto& sv = world.surrounding[sv_index];
  const RelativePose rel = relative_pose(sv, world.ego, net);
  switch (pred) {
    case StepPredicate::None:
      return false;
    case StepPredicate::GapBelowSafe:
      return rel.ds <= 0.0 ? rel.gap < cfg.d_safe : true;
    case StepPredicate::SideFrontOfEgo:
      return rel.ds > 0.0 && rel.gap > 0.5;
  }
  return false;
}

}  // namespace

PatternState compile_pattern(PatternKind kind, const sim::WorldState& world,
                             int sv_index, const sim::RoadNetwork& net,
                             const FuzzerConfig& cfg, Rng& rng) {
  const auto& sv = world.surrounding[sv_index];
  const RelativePose rel = relative_pose(sv, world.ego, net);
  PatternState st;
  st.kind = kind;

  switch (kind) {
    case PatternKind::Ahead: {
      // decelerate | brake | swing out and back, equal probability
      const int branch = rng.uniform_int(0, 2);
      if (branch == 0) {
        st.items.push_back({Maneuver::Decelerate, StepPredicate::None, cfg.k_dec});
      } else if (branch == 1) {
        st.items.push_back({Maneuver::Brake, StepPredicate::None, cfg.k_brk});
      } else {
        const Maneuver out = pick_lane_change(net, sv.lane_id, rng.bernoulli(0.5),
                                              &st.substituted_direction);
        const Maneuver back = out == Maneuver::LeftLaneChange
                                  ? Maneuver::RightLaneChange
                                  : Maneuver::LeftLaneChange;
        st.items.push_back({out, StepPredicate::None, cfg.lane_change_steps});
        st.items.push_back({back, StepPredicate::None, cfg.lane_change_steps});
      }
      break;
    }
    case PatternKind::SideFront: {
      // State A: move into the ego's lane, then one of three maneuvers.
      const Maneuver toward = rel.lane_delta > 0 ? Maneuver::LeftLaneChange
                                                 : Maneuver::RightLaneChange;
      st.items.push_back({toward, StepPredicate::None, cfg.lane_change_steps});
      const int branch = rng.uniform_int(0, 2);
      if (branch == 0) {
        st.items.push_back({Maneuver::Decelerate, StepPredicate::None, cfg.k_dec});
      } else if (branch == 1) {
        // a further lane change, random feasible side from the ego's lane
        const Maneuver lc = pick_lane_change(net, world.ego.lane_id,
                                             rng.bernoulli(0.5),
                                             &st.substituted_direction);
        st.items.push_back({lc, StepPredicate::None, cfg.lane_change_steps});
      } else {
        st.items.push_back({Maneuver::Brake, StepPredicate::None, cfg.k_brk});
      }
      break;
    }
    case PatternKind::Behind: {
      // A: close the gap, B: change lane, C: pull ahead alongside.
      if (!(rel.gap < cfg.d_safe)) {
        st.items.push_back(
            {Maneuver::Accelerate, StepPredicate::GapBelowSafe, cfg.pattern_horizon});
      }
      const Maneuver lc = pick_lane_change(net, sv.lane_id, rng.bernoulli(0.5),
                                           &st.substituted_direction);
      st.items.push_back({lc, StepPredicate::None, cfg.lane_change_steps});
      st.items.push_back({Maneuver::Accelerate, StepPredicate::SideFrontOfEgo,
                          cfg.pattern_horizon});
      break;
    }
    case PatternKind::SideBehind: {
      st.items.push_back({Maneuver::Accelerate, StepPredicate::SideFrontOfEgo,
                          cfg.pattern_horizon});
      break;
    }
  }
  return st;
}

AdvanceResult pattern_advance(const PatternState& state,
                              const sim::WorldState& world, int sv_index,
                              const sim::RoadNetwork& net,
                              const FuzzerConfig& cfg) {
  assert(state.active);
  AdvanceResult res;
  res.state = state;
  PatternState& st = res.state;

  while (st.cursor < st.items.size()) {
    const PatternItem& item = st.items[st.cursor];
    // Position-conditioned items re-check their predicate once they have
    // emitted at least one step.
    if (item.until != StepPredicate::None && st.steps_in_item > 0 &&
        predicate_holds(item.until, world, sv_index, net, cfg)) {
      st.cursor += 1;
      st.steps_in_item = 0;
      continue;
    }
    if (st.steps_in_item >= item.max_steps) {
      if (item.until != StepPredicate::None) st.forced_completion = true;
      st.cursor += 1;
      st.steps_in_item = 0;
      continue;
    }
    st.steps_in_item += 1;
    res.maneuver = item.maneuver;
    // deactivate immediately after the final emission of the final item
    if (item.until == StepPredicate::None &&
        st.steps_in_item >= item.max_steps &&
        st.cursor + 1 == st.items.size()) {
      st.cursor += 1;
      st.steps_in_item = 0;
      st.active = false;
    }
    return res;
  }
  st.active = false;  // completed without a maneuver due this step
  return res;
}

bool constraint_condition(int vehicle_id, const sim::WorldState& world,
                          const sim::RoadNetwork& net,
                          const FuzzerConfig& cfg) {
  if (sim::min_neighbor_distance(world, vehicle_id) < cfg.d_constraint) {
    return true;
  }
  return !sim::is_within_boundary(world.vehicle(vehicle_id), net);
}

Maneuver apply_constraints(Maneuver maneuver, int vehicle_id,
                           const sim::WorldState& world,
                           const sim::RoadNetwork& net,
                           const FuzzerConfig& cfg) {
  if (constraint_condition(vehicle_id, world, net, cfg)) {
    return Maneuver::Brake;
  }
  return maneuver;
}

}  // namespace marlot::fuzzer
