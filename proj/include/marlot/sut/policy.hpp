#pragma once

#include <optional>
#include <string>

#include "marlot/sim/collision.hpp"
#include "marlot/sim/road.hpp"
#include "marlot/sim/vehicle.hpp"
#include "marlot/sut/idm.hpp"

namespace marlot::sut {

struct SutConfig {
  IdmParams idm;
  double d_safe = 3.5;           // clearance a sidestep must find
  double stopped_speed = 0.5;    // below this a leader counts as stopped
  double sidestep_range = 10.0;  // stopped-leader gap that prompts a sidestep
  // Escape rule: thresholds under which a boxed-in ego resorts to reversing
  // or holding still. These make abnormal trajectories reachable outcomes
  // rather than scripted ones.
  double escape_gap = 2.5;
  double reverse_margin = 6.0;
  // Heuristic policy (intentionally weaker margins than IDM):
  double h_target_speed = 18.0;
  double h_gain = 0.8;
  double h_brake_gap = 1.75;  // hard-brake distance
  double h_headway = 0.8;     // s of headway before it eases off
  double h_sidestep_gap = 6.0;
  double h_sidestep_margin = 1.75;
  double a_brk = 6.0;
};

/// Nearest vehicle occupying `lane_id` ahead of (or behind) arc length
/// `ref_s`; gap is bumper-to-bumper.
struct LaneGap {
  int vehicle_id = -1;
  double gap = 0.0;
  double speed = 0.0;
};

std::optional<LaneGap> nearest_ahead(const sim::WorldState& world,
                                     const sim::RoadNetwork& net, int lane_id,
                                     double ref_s, int exclude_id);
std::optional<LaneGap> nearest_behind(const sim::WorldState& world,
                                      const sim::RoadNetwork& net, int lane_id,
                                      double ref_s, int exclude_id);

/// IDM-based ego policy: car-following against the nearest same-lane leader,
/// sidestep around stopped leaders when an adjacent lane is clear both ways,
/// escape rule when fully boxed in.
sim::SutDecision idm_policy_step(const sim::WorldState& world,
                                 const sim::RoadNetwork& net,
                                 const SutConfig& cfg);

/// Simple reactive policy standing in for a learned SUT: target-speed
/// tracking with late threshold braking and optimistic sidesteps. Less
/// robust than the IDM policy by construction.
sim::SutDecision heuristic_policy_step(const sim::WorldState& world,
                                       const sim::RoadNetwork& net,
                                       const SutConfig& cfg);

}  // namespace marlot::sut
