#include "marlot/sim/vehicle.hpp"

#include <cmath>

#include "doctest.h"
#include "marlot/rng.hpp"
#include "marlot/sim/collision.hpp"

using namespace marlot;
using sim::BlockKind;
using sim::BlockSpec;
using sim::SimParams;

namespace {

sim::RoadNetwork straight_road(int lanes = 3) {
  return sim::build_road({BlockSpec{BlockKind::Straight, 400.0, 0}}, lanes, 1);
}

// Footprint-containment oracle built from per-segment corridor quads plus
// vertex discs, independent of the distance-to-polyline implementation.
bool corridor_oracle_contains(const sim::RoadNetwork& net,
                              const geom::Vec2& p) {
  const auto in_lane = [&p](const sim::Lane& lane) {
    const auto& pts = lane.center.points();
    const double half = lane.width * 0.5;
    for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
      const geom::Vec2 a = pts[i], b = pts[i + 1];
      const geom::Vec2 dir = (b - a).normalized();
      const double t = (p - a).dot(dir);
      if (t >= 0.0 && t <= (b - a).norm()) {
        const double lat = std::abs(dir.cross(p - a));
        if (lat <= half) return true;
      }
    }
    for (const auto& v : pts) {
      if (geom::distance(p, v) <= half) return true;
    }
    return false;
  };
  for (const auto& lane : net.lanes) {
    if (in_lane(lane)) return true;
  }
  for (const auto& lane : net.aux_lanes) {
    if (in_lane(lane)) return true;
  }
  return false;
}

}  // namespace

TEST_CASE("accelerate: v + a*dt") {
  const auto net = straight_road();
  SimParams p;
  auto v = sim::place_vehicle(1, net, 0, 50.0, 0.0, 10.0, p);
  const auto out = sim::step_vehicle(v, Maneuver::Accelerate, net, p);
  CHECK(out.state.speed == doctest::Approx(10.25));
  CHECK_FALSE(out.degraded_lane_change);
}

TEST_CASE("decelerate floors at v_min") {
  const auto net = straight_road();
  SimParams p;
  auto v = sim::place_vehicle(1, net, 0, 50.0, 0.0, 2.0, p);
  const auto out = sim::step_vehicle(v, Maneuver::Decelerate, net, p);
  CHECK(out.state.speed == doctest::Approx(2.0));
  // a vehicle already below the floor holds its speed instead of rising
  v.speed = 1.0;
  const auto held = sim::step_vehicle(v, Maneuver::Decelerate, net, p);
  CHECK(held.state.speed == doctest::Approx(1.0));
}

TEST_CASE("brake clamps at zero") {
  const auto net = straight_road();
  SimParams p;
  p.dt = 1.0;  // one large step so the decrement exceeds the speed
  auto v = sim::place_vehicle(1, net, 0, 50.0, 0.0, 1.0, p);
  const auto out = sim::step_vehicle(v, Maneuver::Brake, net, p);
  CHECK(out.state.speed == 0.0);
}

TEST_CASE("lane change completes over its duration and snaps the lane id") {
  const auto net = straight_road();
  SimParams p;
  auto v = sim::place_vehicle(1, net, 1, 50.0, 0.0, 10.0, p);
  auto out = sim::step_vehicle(v, Maneuver::LeftLaneChange, net, p);
  CHECK(out.state.lane_id == 1);  // still blending
  CHECK(out.state.lane_change.active);
  const int blend_steps = static_cast<int>(p.lane_change_duration / p.dt);
  auto cur = out.state;
  for (int i = 1; i < blend_steps; ++i) {
    cur = sim::step_vehicle(cur, Maneuver::LeftLaneChange, net, p).state;
  }
  CHECK(cur.lane_id == 0);
  CHECK_FALSE(cur.lane_change.active);
  CHECK(std::abs(cur.d) < 1e-9);
  CHECK(cur.speed == doctest::Approx(10.0));  // constant-speed blend
}

TEST_CASE("illegal lane change degrades to decelerate and flags") {
  const auto net = straight_road();
  SimParams p;
  auto v = sim::place_vehicle(1, net, 0, 50.0, 0.0, 10.0, p);
  const auto out = sim::step_vehicle(v, Maneuver::LeftLaneChange, net, p);
  CHECK(out.degraded_lane_change);
  CHECK(out.state.speed == doctest::Approx(10.0 - 2.0 * 0.1));
  CHECK_FALSE(out.state.lane_change.active);
}

TEST_CASE("trajectories are bitwise deterministic") {
  const auto net = straight_road();
  SimParams p;
  Rng rng(7);
  std::vector<Maneuver> script;
  for (int i = 0; i < 300; ++i) {
    script.push_back(kAllManeuvers[rng.uniform_int(0, 4)]);
  }
  auto run = [&]() {
    auto v = sim::place_vehicle(1, net, 1, 30.0, 0.0, 8.0, p);
    std::vector<geom::Vec2> path;
    for (const auto m : script) {
      v = sim::step_vehicle(v, m, net, p).state;
      path.push_back(v.position);
    }
    return path;
  };
  const auto a = run();
  const auto b = run();
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].x == b[i].x);
    CHECK(a[i].y == b[i].y);
  }
}

TEST_CASE("kinematic continuity: per-step displacement bounded") {
  const auto net = straight_road();
  SimParams p;
  Rng rng(11);
  auto v = sim::place_vehicle(1, net, 1, 30.0, 0.0, 15.0, p);
  const double bound = p.v_max * p.dt + 0.5 * p.a_brk * p.dt * p.dt + 1e-9;
  for (int i = 0; i < 500; ++i) {
    const auto m = kAllManeuvers[rng.uniform_int(0, 4)];
    const auto next = sim::step_vehicle(v, m, net, p).state;
    CHECK(geom::distance(next.position, v.position) <= bound);
    v = next;
  }
}

TEST_CASE("collision detection: examples and oracle sweep") {
  const auto net = straight_road();
  SimParams p;
  sim::WorldState world;
  world.ego = sim::place_vehicle(0, net, 0, 50.0, 0.0, 10.0, p);

  SUBCASE("same pose collides") {
    world.surrounding = {sim::place_vehicle(1, net, 0, 50.0, 0.0, 10.0, p)};
    const auto pairs = sim::detect_collisions(world);
    REQUIRE(pairs.size() == 1);
    CHECK(pairs[0] == std::pair<int, int>{0, 1});
  }
  SUBCASE("10 m longitudinal gap does not") {
    world.surrounding = {sim::place_vehicle(1, net, 0, 60.0, 0.0, 10.0, p)};
    CHECK(sim::detect_collisions(world).empty());
  }
  SUBCASE("no self-pairs and symmetric under reordering") {
    world.surrounding = {sim::place_vehicle(1, net, 0, 52.0, 0.0, 10.0, p),
                         sim::place_vehicle(2, net, 1, 50.0, 0.5, 10.0, p)};
    const auto pairs = sim::detect_collisions(world);
    for (const auto& [a, b] : pairs) CHECK(a < b);
  }
}

TEST_CASE("min_neighbor_distance: min of center distances") {
  const auto net = straight_road();
  SimParams p;
  sim::WorldState world;
  world.ego = sim::place_vehicle(0, net, 0, 50.0, 0.0, 10.0, p);
  world.surrounding = {sim::place_vehicle(1, net, 0, 53.0, 0.0, 10.0, p),
                       sim::place_vehicle(2, net, 0, 57.0, 0.0, 10.0, p)};
  CHECK(sim::min_neighbor_distance(world, 0) == doctest::Approx(3.0));
  CHECK(sim::min_neighbor_distance(world, 2) == doctest::Approx(4.0));

  // brute-force pairwise oracle over randomized worlds
  Rng rng(13);
  for (int trial = 0; trial < 500; ++trial) {
    sim::WorldState w;
    w.ego = sim::place_vehicle(0, net, rng.uniform_int(0, 2),
                               rng.uniform(20, 380), rng.uniform(-1, 1),
                               5.0, p);
    const int n = rng.uniform_int(1, 4);
    for (int i = 1; i <= n; ++i) {
      w.surrounding.push_back(
          sim::place_vehicle(i, net, rng.uniform_int(0, 2),
                             rng.uniform(20, 380), rng.uniform(-1, 1), 5.0, p));
    }
    const auto all = w.all();
    for (const auto* self : all) {
      double expect = 1e300;
      for (const auto* other : all) {
        if (other->id == self->id) continue;
        expect = std::min(expect,
                          geom::distance(self->position, other->position));
      }
      CHECK(sim::min_neighbor_distance(w, self->id) ==
            doctest::Approx(expect).epsilon(1e-12));
    }
  }
}

TEST_CASE("boundary checks: centerline inside, far outside is not") {
  const auto net = straight_road(2);
  SimParams p;
  auto v = sim::place_vehicle(1, net, 0, 50.0, 0.0, 10.0, p);
  CHECK(sim::is_within_boundary(v, net));
  // beyond the outer edge by lane_width * lane_count
  auto outside = sim::place_vehicle(1, net, 0, 50.0, 3.5 * 2.0, 10.0, p);
  CHECK_FALSE(sim::is_within_boundary(outside, net));
}

TEST_CASE("boundary: footprint straddling the outer edge by 0.3 m is out") {
  const auto net = straight_road(2);
  SimParams p;
  // left lane edge sits at d = +1.75; body half-width 0.95. An offset of
  // 1.75 - 0.95 + 0.3 pushes the left corners 0.3 m over the edge.
  auto v = sim::place_vehicle(1, net, 0, 50.0, 1.75 - 0.95 + 0.3, 10.0, p);
  CHECK_FALSE(sim::is_within_boundary(v, net));
  auto in = sim::place_vehicle(1, net, 0, 50.0, 1.75 - 0.95 - 0.3, 10.0, p);
  CHECK(sim::is_within_boundary(in, net));
}

TEST_CASE("boundary verdicts agree with the corridor-construction oracle") {
  const std::vector<BlockSpec> spec = {BlockSpec{BlockKind::Straight, 60.0, 0},
                                       BlockSpec{BlockKind::Circular, 0, 45.0}};
  const auto net = sim::build_road(spec, 2, 5);
  SimParams p;
  Rng rng(21);
  for (int trial = 0; trial < 400; ++trial) {
    const int lane = rng.uniform_int(0, 1);
    const double s = rng.uniform(1.0, net.lanes[lane].center.length() - 1.0);
    const double d = rng.uniform(-4.0, 4.0);
    auto v = sim::place_vehicle(1, net, lane, s, d, 5.0, p);
    bool oracle = corridor_oracle_contains(net, v.position);
    for (const auto& corner : v.footprint().corners()) {
      oracle = oracle && corridor_oracle_contains(net, corner);
    }
    CHECK(sim::is_within_boundary(v, net) == oracle);
  }
}

TEST_CASE("ego reverse and off-road swerve are expressible") {
  const auto net = straight_road(2);
  SimParams p;
  auto ego = sim::place_vehicle(0, net, 0, 50.0, 0.0, 0.0, p);
  sim::SutDecision reverse{0.0, sim::LaneIntent::Reverse};
  auto v = ego;
  for (int i = 0; i < 30; ++i) v = sim::step_ego(v, reverse, net, p);
  CHECK(v.speed < -0.1);
  CHECK(v.s < ego.s);

  // left intent on the leftmost lane: no adjacent lane, ego swerves off
  auto swerve = sim::place_vehicle(0, net, 0, 50.0, 0.0, 10.0, p);
  sim::SutDecision left{0.0, sim::LaneIntent::Left};
  auto w = sim::step_ego(swerve, left, net, p);
  for (int i = 0; i < 20; ++i) {
    w = sim::step_ego(w, sim::SutDecision{}, net, p);
  }
  CHECK(w.lane_id == 0);
  CHECK(w.d == doctest::Approx(3.5).epsilon(1e-6));
  CHECK_FALSE(sim::is_within_boundary(w, net));
}
