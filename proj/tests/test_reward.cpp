#include "marlot/arena/reward.hpp"

#include <cmath>

#include "doctest.h"

using namespace marlot;
using arena::ArenaState;
using arena::RewardWeights;
using geom::Vec2;

namespace {

// Independent ray-casting point-in-polygon oracle (agents ordered by angle
// around the query point's own centroid would be wrong; the polygon is the
// angular ordering around the evader, matching the fan construction).
bool raycast_inside(const std::vector<Vec2>& poly, const Vec2& p) {
  bool inside = false;
  const std::size_t n = poly.size();
  for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
    const Vec2& a = poly[i];
    const Vec2& b = poly[j];
    const bool crosses = (a.y > p.y) != (b.y > p.y);
    if (crosses) {
      const double x_at = (b.x - a.x) * (p.y - a.y) / (b.y - a.y) + a.x;
      if (p.x < x_at) inside = !inside;
    }
  }
  return inside;
}

std::vector<Vec2> angular_ring(const std::vector<Vec2>& agents,
                               const Vec2& evader) {
  std::vector<Vec2> ring = agents;
  std::sort(ring.begin(), ring.end(), [&](const Vec2& a, const Vec2& b) {
    return std::atan2(a.y - evader.y, a.x - evader.x) <
           std::atan2(b.y - evader.y, b.x - evader.x);
  });
  return ring;
}

ArenaState make_state(std::vector<Vec2> pos, std::vector<Vec2> vel,
                      Vec2 evader) {
  ArenaState st;
  st.pos = std::move(pos);
  st.vel = std::move(vel);
  st.evader_pos = evader;
  return st;
}

const std::vector<Vec2> kTriangle = {{1, 0}, {-0.5, 0.866}, {-0.5, -0.866}};

}  // namespace

TEST_CASE("fan identity: centroid-enclosing configuration") {
  const auto g = arena::enclosure_geometry(kTriangle, Vec2{0, 0});
  CHECK(std::abs(g.tri_sum - g.hull_area) < 1e-9);
  CHECK(arena::enclosed(g, 1e-6));
}

TEST_CASE("fan strict excess for an exterior evader") {
  const auto g = arena::enclosure_geometry(kTriangle, Vec2{5, 5});
  CHECK(g.tri_sum > g.hull_area + 1e-6);
  CHECK_FALSE(arena::enclosed(g, 1e-6));
}

TEST_CASE("collinear agents degenerate to outside") {
  const std::vector<Vec2> line = {{0, 0}, {1, 0}, {2, 0}};
  const auto g = arena::enclosure_geometry(line, Vec2{1, 0.5});
  CHECK(g.degenerate);
  CHECK_FALSE(arena::enclosed(g, 1e-6));
}

TEST_CASE("fan verdict equals the ray-casting oracle on random configs") {
  Rng rng(271828);
  int inside_count = 0;
  for (int trial = 0; trial < 10000; ++trial) {
    std::vector<Vec2> agents(3 + trial % 3);  // n in {3, 4, 5}
    for (auto& p : agents) {
      p.x = rng.uniform(-1.0, 1.0);
      p.y = rng.uniform(-1.0, 1.0);
    }
    const Vec2 evader{rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0)};
    const auto g = arena::enclosure_geometry(agents, evader);
    const bool fan = arena::enclosed(g, 1e-6);
    const bool oracle = raycast_inside(angular_ring(agents, evader), evader);
    REQUIRE(fan == oracle);
    inside_count += fan ? 1 : 0;
  }
  CHECK(inside_count > 500);  // both verdicts must be exercised
  CHECK(inside_count < 9500);
}

TEST_CASE("fan sum never drops below the hull area") {
  Rng rng(161803);
  for (int trial = 0; trial < 5000; ++trial) {
    std::vector<Vec2> agents(3);
    for (auto& p : agents) {
      p.x = rng.uniform(-2.0, 2.0);
      p.y = rng.uniform(-2.0, 2.0);
    }
    const Vec2 evader{rng.uniform(-2.0, 2.0), rng.uniform(-2.0, 2.0)};
    const auto g = arena::enclosure_geometry(agents, evader);
    CHECK(g.tri_sum >= g.hull_area - 1e-6 * std::max(1.0, g.hull_area));
  }
}

TEST_CASE("verdicts are stable under translation and rotation") {
  Rng rng(314159);
  for (int trial = 0; trial < 500; ++trial) {
    std::vector<Vec2> agents(3);
    for (auto& p : agents) {
      p.x = rng.uniform(-1.0, 1.0);
      p.y = rng.uniform(-1.0, 1.0);
    }
    const Vec2 evader{rng.uniform(-0.5, 0.5), rng.uniform(-0.5, 0.5)};
    const bool base =
        arena::enclosed(arena::enclosure_geometry(agents, evader), 1e-6);
    const double angle = rng.uniform(0.0, 6.283);
    const Vec2 shift{rng.uniform(-10, 10), rng.uniform(-10, 10)};
    std::vector<Vec2> moved;
    for (const auto& p : agents) moved.push_back(p.rotated(angle) + shift);
    const bool after = arena::enclosed(
        arena::enclosure_geometry(moved, evader.rotated(angle) + shift), 1e-6);
    CHECK(base == after);
  }
}

TEST_CASE("r_near: zero movement vector earns nothing") {
  const auto st = make_state(kTriangle, {{0, 0}, {0, 0}, {0, 0}}, {0, 0});
  const auto rr = arena::agent_reward(st, st, RewardWeights{});
  for (const auto& t : rr.per_agent) CHECK(t.r_near == 0.0);
}

TEST_CASE("r_near sign-convention pair: corrected vs literal") {
  // agent at (1,0) moving straight at the evader at the origin
  RewardWeights w;
  const auto next = make_state({{1, 0}, {5, 5}, {5, -5}},
                               {{-0.1, 0}, {0, 0}, {0, 0}}, {0, 0});
  const auto prev = make_state({{1.1, 0}, {5, 5}, {5, -5}},
                               {{0, 0}, {0, 0}, {0, 0}}, {0, 0});
  const auto corrected = arena::agent_reward(prev, next, w);
  CHECK(std::abs(corrected.per_agent[0].r_near - 0.0990099) < 1e-6);
  // exact value: 0.1 * (0.1 / (0.1 * 1 + 0.001))
  CHECK(corrected.per_agent[0].r_near ==
        doctest::Approx(0.1 * (0.1 / 0.101)).epsilon(1e-12));
  w.literal_eq6_sign = true;
  const auto literal = arena::agent_reward(prev, next, w);
  CHECK(literal.per_agent[0].r_near ==
        doctest::Approx(-0.1 * (0.1 / 0.101)).epsilon(1e-12));
}

TEST_CASE("finish: enclosure within d_enclosure pays I and terminates") {
  RewardWeights w;
  const std::vector<Vec2> close = {{0.2, 0}, {-0.1, 0.173}, {-0.1, -0.173}};
  const auto next = make_state(close, {{0, 0}, {0, 0}, {0, 0}}, {0, 0});
  const auto rr = arena::agent_reward(next, next, w);
  CHECK(rr.done);
  for (const auto& t : rr.per_agent) {
    CHECK(t.r_finish == doctest::Approx(10.0));
    CHECK(t.total == doctest::Approx(w.mu3 * 10.0));
  }
}

TEST_CASE("phase mutual exclusion across random reachable states") {
  Rng rng(173205);
  RewardWeights w;
  for (int trial = 0; trial < 10000; ++trial) {
    std::vector<Vec2> pos(3), vel(3);
    for (auto& p : pos) {
      p.x = rng.uniform(-1.0, 1.0);
      p.y = rng.uniform(-1.0, 1.0);
    }
    for (auto& v : vel) {
      v.x = rng.uniform(-0.1, 0.1);
      v.y = rng.uniform(0.0, 0.1);
    }
    const Vec2 evader{rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0)};
    auto st = make_state(pos, vel, evader);
    const auto rr = arena::agent_reward(st, st, w);
    const auto& t = rr.per_agent[0];
    int active = 0;
    if (t.r_track != 0.0) ++active;
    if (t.r_encircle != 0.0) ++active;
    if (t.r_full != 0.0) ++active;
    if (t.r_finish != 0.0) ++active;
    CHECK(active <= 1);
    // sign structure per phase
    CHECK(t.r_track <= 0.0);
    CHECK(t.r_track >= -3.0);
    CHECK(t.r_encircle <= 0.0);
    CHECK(t.r_full >= 0.0);
    // termination soundness: finish iff enclosed and tight
    const auto g = arena::enclosure_geometry(st.pos, st.evader_pos);
    const bool should_finish =
        arena::enclosed(g, w.area_rel_tol) && g.max_dist <= w.d_enclosure;
    CHECK(rr.done == should_finish);
    CHECK((t.r_finish > 0.0) == should_finish);
    if (should_finish) {
      const bool oracle_inside =
          raycast_inside(angular_ring(st.pos, st.evader_pos), st.evader_pos);
      CHECK(oracle_inside);
    }
  }
}

TEST_CASE("two-agent reduction: distance-only finish, no area terms") {
  RewardWeights w;
  auto near2 = make_state({{0.1, 0}, {-0.1, 0}}, {{0, 0}, {0, 0}}, {0, 0});
  const auto rr = arena::agent_reward(near2, near2, w);
  CHECK(rr.done);
  CHECK(rr.per_agent[0].r_finish == doctest::Approx(10.0));
  CHECK(rr.per_agent[0].r_track == 0.0);
  CHECK(rr.per_agent[0].r_encircle == 0.0);
  auto far2 = make_state({{0.9, 0}, {-0.1, 0}}, {{0, 0}, {0, 0}}, {0, 0});
  CHECK_FALSE(arena::agent_reward(far2, far2, w).done);
}

TEST_CASE("ego reward: zero when nothing moves, distance growth otherwise") {
  const auto st = make_state(kTriangle, {{0, 0}, {0, 0}, {0, 0}}, {0, 0});
  CHECK(arena::ego_reward(st, st) == 0.0);

  // single relevant agent: evader retreats by 0.1 along the axis
  auto prev = make_state({{1, 0}, {1, 0}, {1, 0}}, {{0, 0}, {0, 0}, {0, 0}},
                         {0, 0});
  auto next = prev;
  next.evader_pos = {-0.1, 0};
  const double expect = 3 * (1.1 - 1.0);
  CHECK(arena::ego_reward(prev, next) == doctest::Approx(expect).epsilon(1e-12));
}

TEST_CASE("ego reward equals an independent recomputation on random pairs") {
  Rng rng(577215);
  for (int trial = 0; trial < 1000; ++trial) {
    std::vector<Vec2> p0(3), p1(3), vel(3);
    for (int i = 0; i < 3; ++i) {
      p0[i] = {rng.uniform(-1, 1), rng.uniform(-1, 1)};
      p1[i] = {rng.uniform(-1, 1), rng.uniform(-1, 1)};
    }
    const Vec2 e0{rng.uniform(-1, 1), rng.uniform(-1, 1)};
    const Vec2 e1{rng.uniform(-1, 1), rng.uniform(-1, 1)};
    const auto prev = make_state(p0, vel, e0);
    const auto next = make_state(p1, vel, e1);
    double expect = 0.0;
    for (int i = 0; i < 3; ++i) {
      expect += std::hypot(p1[i].x - e1.x, p1[i].y - e1.y) -
                std::hypot(p0[i].x - e0.x, p0[i].y - e0.y);
    }
    CHECK(arena::ego_reward(prev, next) ==
          doctest::Approx(expect).epsilon(1e-9));
  }
}
