#include "marlot/harness/episode.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "marlot/sut/policy.hpp"

namespace marlot::harness {

std::string to_string(EpisodeOutcome outcome) {
  switch (outcome) {
    case EpisodeOutcome::Destination: return "destination";
    case EpisodeOutcome::Violation: return "violation";
    case EpisodeOutcome::StepCap: return "step_cap";
    case EpisodeOutcome::UnattributedCrash: return "unattributed_crash";
    case EpisodeOutcome::ControllerError: return "controller_error";
  }
  return "unknown";
}

sim::WorldState spawn_world(const Config& cfg, const sim::RoadNetwork& net,
                            Rng& rng) {
  sim::WorldState world;
  world.dt = cfg.sim.dt;

  const int ego_lane = rng.uniform_int(0, net.lane_count - 1);
  const double ego_s = rng.uniform(net.spawn_min_s, net.spawn_max_s);
  world.ego = sim::place_vehicle(0, net, ego_lane, ego_s, 0.0,
                                 cfg.ego_initial_speed, cfg.sim);

  const auto clear_of_everyone = [&](const sim::VehicleState& v) {
    if (geom::obb_clearance(world.ego.footprint(), v.footprint()) < 0.8) {
      return false;
    }
    for (const auto& sv : world.surrounding) {
      if (geom::obb_clearance(sv.footprint(), v.footprint()) < 0.8) {
        return false;
      }
    }
    return true;
  };

  for (int i = 1; i <= cfg.n_svs; ++i) {
    bool placed = false;
    for (int attempt = 0; attempt < 100 && !placed; ++attempt) {
      const int lane = rng.uniform_int(0, net.lane_count - 1);
      const double lane_len = net.lanes[lane].center.length();
      double s = ego_s + rng.uniform(-cfg.spawn_span, cfg.spawn_span);
      s = std::clamp(s, 3.0, lane_len - 10.0);
      const double speed = rng.uniform(cfg.sv_speed_min, cfg.sv_speed_max);
      const auto v = sim::place_vehicle(i, net, lane, s, 0.0, speed, cfg.sim);
      if (clear_of_everyone(v)) {
        world.surrounding.push_back(v);
        placed = true;
      }
    }
    if (!placed) {
      // fall back to a slot behind the pack
      const int lane = rng.uniform_int(0, net.lane_count - 1);
      const double s = std::max(3.0, ego_s - cfg.spawn_span - 8.0 * i);
      world.surrounding.push_back(sim::place_vehicle(
          i, net, lane, s, 0.0, cfg.sv_speed_min, cfg.sim));
    }
  }
  return world;
}

int episode_step_cap(const Config& cfg, const sim::RoadNetwork& net) {
  double max_len = 0.0;
  for (const auto& lane : net.lanes) {
    max_len = std::max(max_len, lane.center.length());
  }
  const double seconds = max_len / (0.5 * cfg.sut_cfg.idm.v0);
  const int steps = static_cast<int>(std::ceil(seconds / cfg.sim.dt));
  return std::max(cfg.step_cap_min, steps);
}

SutPolicy make_sut_policy(const Config& cfg) {
  const sut::SutConfig sc = cfg.sut_cfg;
  if (cfg.sut == "heuristic") {
    return [sc](const sim::WorldState& w, const sim::RoadNetwork& n) {
      return sut::heuristic_policy_step(w, n, sc);
    };
  }
  return [sc](const sim::WorldState& w, const sim::RoadNetwork& n) {
    return sut::idm_policy_step(w, n, sc);
  };
}

namespace {

const char* intent_name(sim::LaneIntent intent) {
  switch (intent) {
    case sim::LaneIntent::Keep: return "keep";
    case sim::LaneIntent::Left: return "left";
    case sim::LaneIntent::Right: return "right";
    case sim::LaneIntent::Reverse: return "reverse";
    case sim::LaneIntent::Stop: return "stop";
  }
  return "unknown";
}

TraceVehicle capture(const sim::VehicleState& v) {
  TraceVehicle t;
  t.id = v.id;
  t.x = v.position.x;
  t.y = v.position.y;
  t.heading = v.heading;
  t.speed = v.speed;
  t.lane = v.lane_id;
  t.s = v.s;
  t.d = v.d;
  t.crashed = v.crashed;
  return t;
}

}  // namespace

EpisodeResult run_episode(const Config& cfg, const sim::RoadNetwork& net,
                          const SutPolicy& sut, const SvController& controller,
                          Rng& rng, const nlohmann::ordered_json& header_extra) {
  EpisodeResult result;
  result.min_ego_clearance = std::numeric_limits<double>::max();

  sim::WorldState world = spawn_world(cfg, net, rng);
  const int cap = episode_step_cap(cfg, net);

  ViolationParams vp;
  vp.d_constraint = cfg.fuzzer.d_constraint;
  vp.stall_steps = cfg.stall_steps;
  vp.reverse_steps = cfg.reverse_steps;
  vp.reverse_speed_threshold = cfg.reverse_speed_threshold;
  vp.stall_speed_threshold = cfg.stall_speed_threshold;
  ViolationMonitor monitor(vp);

  auto& trace = result.trace;
  trace.header["scenario"] = cfg.scenario;
  trace.header["lanes"] = cfg.lanes;
  trace.header["sut"] = cfg.sut;
  trace.header["method"] = cfg.method;
  trace.header["n_svs"] = cfg.n_svs;
  trace.header["dt"] = cfg.sim.dt;
  trace.header["step_cap"] = cap;
  for (auto it = header_extra.begin(); it != header_extra.end(); ++it) {
    trace.header[it.key()] = it.value();
  }

  result.outcome = EpisodeOutcome::StepCap;
  for (int step = 0; step < cap; ++step) {
    sim::SutDecision decision;
    std::vector<fuzzer::SvDirective> directives;
    try {
      decision = sut(world, net);
      directives = controller(world, net, rng);
    } catch (const std::exception&) {
      result.outcome = EpisodeOutcome::ControllerError;
      trace.poisoned = true;
      break;
    }

    // One shared constraint pass for every method.
    for (std::size_t i = 0; i < directives.size(); ++i) {
      const int sv_id = world.surrounding[i].id;
      if (fuzzer::constraint_condition(sv_id, world, net, cfg.fuzzer)) {
        directives[i].maneuver = Maneuver::Brake;
        directives[i].constraint_override = true;
      }
    }

    const sim::VehicleState next_ego =
        sim::step_ego(world.ego, decision, net, cfg.sim);
    std::vector<sim::VehicleState> next_svs;
    next_svs.reserve(world.surrounding.size());
    for (std::size_t i = 0; i < world.surrounding.size(); ++i) {
      next_svs.push_back(
          sim::step_vehicle(world.surrounding[i], directives[i].maneuver, net,
                            cfg.sim)
              .state);
    }
    world.ego = next_ego;
    world.surrounding = std::move(next_svs);
    world.step += 1;

    const auto collisions = sim::detect_collisions(world);
    bool ego_collided = false;
    for (const auto& [a, b] : collisions) {
      if (a == world.ego.id || b == world.ego.id) {
        ego_collided = true;
      } else {
        // SV-on-SV contact freezes both as obstacles
        for (auto& sv : world.surrounding) {
          if (sv.id == a || sv.id == b) {
            sv.crashed = true;
            sv.speed = 0.0;
          }
        }
      }
    }

    if (!world.surrounding.empty()) {
      result.min_ego_clearance =
          std::min(result.min_ego_clearance,
                   sim::min_neighbor_clearance(world, world.ego.id));
    }

    const auto violation = monitor.update(world, net, collisions);

    TraceStep ts;
    ts.step = world.step;
    ts.vehicles.push_back(capture(world.ego));
    for (const auto& sv : world.surrounding) ts.vehicles.push_back(capture(sv));
    ts.sut_accel = decision.accel;
    ts.sut_intent = intent_name(decision.intent);
    for (std::size_t i = 0; i < directives.size(); ++i) {
      TraceCommand cmd;
      cmd.sv_id = world.surrounding[i].id;
      cmd.maneuver = directives[i].maneuver;
      cmd.owner = directives[i].owner == fuzzer::OwnerKind::Pattern ? "pattern"
                                                                    : "marl";
      cmd.pattern = directives[i].pattern.has_value()
                        ? to_string(*directives[i].pattern)
                        : "";
      cmd.constraint_override = directives[i].constraint_override;
      ts.commands.push_back(std::move(cmd));
    }
    trace.steps.push_back(std::move(ts));
    result.steps = static_cast<int>(world.step);

    if (violation.has_value()) {
      result.outcome = EpisodeOutcome::Violation;
      result.violation = violation;
      break;
    }
    if (ego_collided) {
      result.outcome = EpisodeOutcome::UnattributedCrash;
      break;
    }
    if (net.at_destination(world.ego.lane_id, world.ego.s)) {
      result.outcome = EpisodeOutcome::Destination;
      break;
    }
  }

  trace.outcome = to_string(result.outcome);
  trace.violation = result.violation;
  return result;
}

}  // namespace marlot::harness
