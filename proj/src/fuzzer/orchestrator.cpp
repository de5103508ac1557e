#include "marlot/fuzzer/orchestrator.hpp"

#include <algorithm>
#include <cmath>

namespace marlot::fuzzer {

Orchestrator::Orchestrator(const marl::Checkpoint& ckpt, int n_svs,
                           FuzzerConfig cfg)
    : cfg_(cfg), n_(n_svs) {
  ckpt.expect_compatible(n_svs, arena::obs_dim(n_svs));
  for (int i = 0; i < n_svs; ++i) {
    actors_.push_back(marl::actor_from_checkpoint(ckpt, i));
  }
  svs_.resize(n_svs);
}

geom::Vec2 Orchestrator::bookkeeping_vector(int sv_index) const {
  return svs_[sv_index].v_book;
}

std::vector<double> Orchestrator::build_obs(const sim::WorldState& world,
                                            const sim::RoadNetwork& net,
                                            int i) const {
  // Ego-centered arena frame: the longitudinal axis maps onto arena y with
  // scale 1/(2 D_safe), the lateral axis onto arena x with scale
  // 1/lane_width (sign flipped: on-road left offset = arena -x so that
  // positive arena x keeps meaning "right lane change").
  const auto& lane = net.lane_by_id(world.ego.lane_id).center;
  const auto ego_proj = lane.project(world.ego.position, world.ego.s);
  const double long_scale = 1.0 / (2.0 * cfg_.d_safe);
  const double lat_scale = 1.0 / net.lane_width;

  const auto arena_coords = [&](const sim::VehicleState& v) {
    const auto proj = lane.project(v.position, v.s);
    return geom::Vec2{-(proj.d - ego_proj.d) * lat_scale,
                      (proj.s - ego_proj.s) * long_scale};
  };
  // movement vector of a vehicle in arena units: physical displacement per
  // step along the road (lateral component folded in only for the ego)
  const auto arena_motion = [&](const sim::VehicleState& v) {
    return geom::Vec2{0.0, v.speed * world.dt * long_scale};
  };

  std::vector<double> obs;
  obs.reserve(arena::obs_dim(n_));
  const geom::Vec2 own = arena_coords(world.surrounding[i]);
  obs.push_back(own.x);
  obs.push_back(own.y);
  obs.push_back(svs_[i].v_book.x);
  obs.push_back(svs_[i].v_book.y);
  for (int k = 1; k < n_; ++k) {
    const auto& other = world.surrounding[(i + k) % n_];
    const geom::Vec2 pos = arena_coords(other);
    const geom::Vec2 vel = arena_motion(other);
    obs.push_back(pos.x);
    obs.push_back(pos.y);
    obs.push_back(vel.x);
    obs.push_back(vel.y);
  }
  // ego (the evader) sits at the frame origin, moving at its own pace
  const geom::Vec2 ego_vel = arena_motion(world.ego);
  obs.push_back(0.0);
  obs.push_back(0.0);
  obs.push_back(ego_vel.x);
  obs.push_back(ego_vel.y);
  return obs;
}

std::vector<SvDirective> Orchestrator::step(const sim::WorldState& world,
                                            const sim::RoadNetwork& net,
                                            Rng& rng) {
  std::vector<SvDirective> out(n_);
  for (int i = 0; i < n_; ++i) {
    const auto& sv = world.surrounding[i];
    PerSv& ctl = svs_[i];
    SvDirective& dir = out[i];
    bool decided = false;

    if (sv.crashed) {
      dir.maneuver = Maneuver::Brake;
      dir.owner = OwnerKind::Marl;
      out[i] = dir;
      continue;
    }

    if (ctl.pattern_owned && ctl.pattern.active) {
      auto adv = pattern_advance(ctl.pattern, world, i, net, cfg_);
      ctl.pattern = adv.state;
      if (adv.maneuver.has_value()) {
        dir.maneuver = *adv.maneuver;
        dir.owner = OwnerKind::Pattern;
        dir.pattern = ctl.pattern.kind;
        decided = true;
      }
      if (!ctl.pattern.active) {
        ctl.pattern_owned = false;
        ctl.just_completed = true;
        ctl.needs_sync = true;
        dir.pattern_completed = true;
      }
    }

    if (!decided) {
      const auto trig = cfg_.patterns_enabled
                            ? classify_trigger(sv, world.ego, net, cfg_)
                            : std::nullopt;
      bool allow = true;
      if (ctl.just_completed) {
        // after completion the fuzzer decides whether to re-arm
        if (trig.has_value()) allow = rng.bernoulli(cfg_.retrigger_prob);
        ctl.just_completed = false;
      }
      if (trig.has_value() && allow) {
        ctl.pattern = compile_pattern(*trig, world, i, net, cfg_, rng);
        ctl.pattern_owned = true;
        dir.pattern_started = true;
        auto adv = pattern_advance(ctl.pattern, world, i, net, cfg_);
        ctl.pattern = adv.state;
        dir.owner = OwnerKind::Pattern;
        dir.pattern = ctl.pattern.kind;
        dir.maneuver = adv.maneuver.value_or(Maneuver::Decelerate);
        if (!ctl.pattern.active) {
          ctl.pattern_owned = false;
          ctl.just_completed = true;
          ctl.needs_sync = true;
          dir.pattern_completed = true;
        }
      } else {
        // MARL route: actor proposes a movement-vector change; the
        // bookkeeping vector integrates it and the mapping discretizes.
        if (ctl.needs_sync) {
          // seed the bookkeeping from the physical motion
          const double long_scale = 1.0 / (2.0 * cfg_.d_safe);
          ctl.v_book = geom::Vec2{
              0.0, std::clamp(sv.speed * world.dt * long_scale, 0.0,
                              cfg_.bridge_v_cap)};
          ctl.needs_sync = false;
        }
        const auto obs = build_obs(world, net, i);
        const auto act = marl::actor_forward(actors_[i], box_, obs);
        // Recentred y update: outputs below the box midpoint lower the
        // bookkeeping v_y, which may go negative so Brake stays reachable.
        ctl.v_book.x = std::clamp(ctl.v_book.x + act.dvx, -cfg_.bridge_v_cap,
                                  cfg_.bridge_v_cap);
        ctl.v_book.y = std::clamp(ctl.v_book.y + act.dvy - box_.y_mid(),
                                  -cfg_.bridge_v_cap, cfg_.bridge_v_cap);
        dir.maneuver = map_action_to_maneuver(ctl.v_book.x, ctl.v_book.y);
        dir.owner = OwnerKind::Marl;
      }
    }

    dir.constraint_override = constraint_condition(sv.id, world, net, cfg_);
    if (dir.constraint_override) dir.maneuver = Maneuver::Brake;
  }
  return out;
}

}  // namespace marlot::fuzzer
