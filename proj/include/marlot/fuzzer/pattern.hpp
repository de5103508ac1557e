#pragma once

#include <optional>
#include <vector>

#include "marlot/maneuver.hpp"
#include "marlot/rng.hpp"
#include "marlot/sim/collision.hpp"
#include "marlot/sim/road.hpp"
#include "marlot/sim/vehicle.hpp"

namespace marlot::fuzzer {

struct FuzzerConfig {
  double d_safe = 3.5;           // front trigger distance (= lane width)
  double d_constraint = 2.0;     // brake-override proximity threshold
  double side_behind_range = 7.0;
  int pattern_horizon = 100;     // cap on position-conditioned states
  int k_brk = 15;                // brake burst length, steps
  int k_dec = 15;                // decelerate burst length, steps
  int lane_change_steps = 15;    // matches the 1.5 s blend at dt = 0.1
  double retrigger_prob = 0.5;   // chance to re-arm after completion
  double bridge_v_cap = 0.1;     // bookkeeping movement-vector cap
  bool patterns_enabled = true;  // false: pure mapping (single-RL baseline)
};

/// The four rule-based action patterns, keyed by where the surrounding
/// vehicle sits relative to the ego when the fuzzer takes over.
enum class PatternKind { Ahead, SideFront, Behind, SideBehind };

const char* to_string(PatternKind kind);

/// SV pose expressed in the ego's lane frame.
struct RelativePose {
  double ds = 0.0;     // s_sv - s_ego along the ego's lane
  double gap = 0.0;    // bumper-to-bumper |ds| - length
  bool same_lane = false;
  bool adjacent = false;
  int lane_delta = 0;  // sv lane index minus ego lane index
};

RelativePose relative_pose(const sim::VehicleState& sv,
                           const sim::VehicleState& ego,
                           const sim::RoadNetwork& net);

/// Zone classification per the trigger rules: Ahead/SideFront require the
/// front gap below d_safe, Behind fires at any distance (its FSM closes the
/// gap itself), SideBehind within its trigger range. No trigger -> nullopt.
std::optional<PatternKind> classify_trigger(const sim::VehicleState& sv,
                                            const sim::VehicleState& ego,
                                            const sim::RoadNetwork& net,
                                            const FuzzerConfig& cfg);

/// Position-conditioned loop predicates inside the FSMs.
enum class StepPredicate { None, GapBelowSafe, SideFrontOfEgo };

struct PatternItem {
  Maneuver maneuver = Maneuver::Decelerate;
  StepPredicate until = StepPredicate::None;
  int max_steps = 1;
};

struct PatternState {
  PatternKind kind = PatternKind::Ahead;
  std::vector<PatternItem> items;
  std::size_t cursor = 0;
  int steps_in_item = 0;
  bool active = true;
  bool substituted_direction = false;  // infeasible side replaced
  bool forced_completion = false;      // predicate horizon hit
};

/// Compiles one path through the pattern's FSM given the current world.
/// Random branches draw with equal probability; an infeasible lane change
/// substitutes the feasible side and records it.
PatternState compile_pattern(PatternKind kind, const sim::WorldState& world,
                             int sv_index, const sim::RoadNetwork& net,
                             const FuzzerConfig& cfg, Rng& rng);

/// Emits the next maneuver and advances the cursor. Predicate items
/// re-evaluate each step and terminate when satisfied or at the horizon.
/// When satisfaction of a final predicate completes the pattern before a
/// maneuver is due, `maneuver` is empty and control falls to the caller.
struct AdvanceResult {
  std::optional<Maneuver> maneuver;
  PatternState state;
};

AdvanceResult pattern_advance(const PatternState& state,
                              const sim::WorldState& world, int sv_index,
                              const sim::RoadNetwork& net,
                              const FuzzerConfig& cfg);

/// True when the driving-behavior constraint fires for this vehicle: the
/// nearest neighbor closer than d_constraint or the footprint off the road.
bool constraint_condition(int vehicle_id, const sim::WorldState& world,
                          const sim::RoadNetwork& net, const FuzzerConfig& cfg);

/// Brake override; passes the maneuver through unchanged otherwise.
Maneuver apply_constraints(Maneuver maneuver, int vehicle_id,
                           const sim::WorldState& world,
                           const sim::RoadNetwork& net,
                           const FuzzerConfig& cfg);

}  // namespace marlot::fuzzer
