#pragma once

#include <functional>
#include <optional>
#include <string>

#include "marlot/harness/config.hpp"
#include "marlot/harness/trace.hpp"
#include "marlot/harness/violation.hpp"

namespace marlot::harness {

enum class EpisodeOutcome {
  Destination,
  Violation,
  StepCap,
  UnattributedCrash,  // ego collision without the interplay condition
  ControllerError,
};

std::string to_string(EpisodeOutcome outcome);

using SvController = std::function<std::vector<fuzzer::SvDirective>(
    const sim::WorldState&, const sim::RoadNetwork&, Rng&)>;
using SutPolicy = std::function<sim::SutDecision(const sim::WorldState&,
                                                 const sim::RoadNetwork&)>;

struct EpisodeResult {
  EpisodeOutcome outcome = EpisodeOutcome::StepCap;
  std::optional<ViolationRecord> violation;
  int steps = 0;
  double min_ego_clearance = 0.0;  // smallest SV clearance seen
  EpisodeTrace trace;
};

/// Initial world: ego on a random lane in the spawn region, surrounding
/// vehicles placed around it without overlap.
sim::WorldState spawn_world(const Config& cfg, const sim::RoadNetwork& net,
                            Rng& rng);

/// Termination-guaranteeing step cap: road length at half the desired speed,
/// never below the configured minimum.
int episode_step_cap(const Config& cfg, const sim::RoadNetwork& net);

SutPolicy make_sut_policy(const Config& cfg);

/// One episode: ego under the SUT, surrounding vehicles under `controller`,
/// every SV maneuver passed through the driving-behavior constraint, the
/// violation oracle watching. Ends on destination, violation, ego collision
/// or the step cap. Controller exceptions poison the trace.
EpisodeResult run_episode(const Config& cfg, const sim::RoadNetwork& net,
                          const SutPolicy& sut, const SvController& controller,
                          Rng& rng,
                          const nlohmann::ordered_json& header_extra = {});

}  // namespace marlot::harness
