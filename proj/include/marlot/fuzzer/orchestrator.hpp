#pragma once

#include <optional>
#include <vector>

#include "marlot/fuzzer/mapping.hpp"
#include "marlot/fuzzer/pattern.hpp"
#include "marlot/marl/maddpg.hpp"

namespace marlot::fuzzer {

enum class OwnerKind { Marl, Pattern };

struct SvDirective {
  Maneuver maneuver = Maneuver::Decelerate;
  OwnerKind owner = OwnerKind::Marl;
  std::optional<PatternKind> pattern;
  bool constraint_override = false;  // behavior constraint forced Brake
  bool pattern_started = false;
  bool pattern_completed = false;
};

/// Per-step control router for the surrounding vehicles: a pattern-owned SV
/// plays out its maneuver sequence; otherwise the trigger rules may start a
/// pattern; otherwise the pre-trained actor proposes a movement-vector
/// update which the fuzzing logic maps to a discrete maneuver. Every result
/// passes the driving-behavior constraint.
class Orchestrator {
 public:
  /// Throws CheckpointError when the checkpoint does not match `n_svs`.
  Orchestrator(const marl::Checkpoint& ckpt, int n_svs, FuzzerConfig cfg);

  std::vector<SvDirective> step(const sim::WorldState& world,
                                const sim::RoadNetwork& net, Rng& rng);

  /// Exposed for tests: bridge bookkeeping movement vector of one SV.
  geom::Vec2 bookkeeping_vector(int sv_index) const;

 private:
  struct PerSv {
    bool pattern_owned = false;
    PatternState pattern;
    bool just_completed = false;
    bool needs_sync = true;
    geom::Vec2 v_book;
  };

  std::vector<double> build_obs(const sim::WorldState& world,
                                const sim::RoadNetwork& net, int i) const;

  std::vector<marl::Mlp> actors_;
  arena::ActionBox box_;
  FuzzerConfig cfg_;
  int n_;
  std::vector<PerSv> svs_;
};

}  // namespace marlot::fuzzer
