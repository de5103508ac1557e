#include "marlot/arena/arena.hpp"

#include <stdexcept>

#include <cmath>

#include "doctest.h"

using namespace marlot;
using arena::AgentAction;
using arena::ArenaConfig;
using arena::ArenaState;

TEST_CASE("reset: n agents, zero movement vectors, evader near center") {
  ArenaConfig cfg;
  Rng rng(1);
  const auto st = arena::arena_reset(cfg, rng);
  REQUIRE(st.pos.size() == 3);
  for (const auto& v : st.vel) {
    CHECK(v.x == 0.0);
    CHECK(v.y == 0.0);
  }
  CHECK(std::abs(st.evader_pos.x) <= cfg.evader_spawn_extent);
  CHECK(std::abs(st.evader_pos.y) <= cfg.evader_spawn_extent);
}

TEST_CASE("reset rejects fewer than two agents") {
  ArenaConfig cfg;
  cfg.n = 1;
  Rng rng(2);
  CHECK_THROWS_AS(arena::arena_reset(cfg, rng), std::invalid_argument);
}

TEST_CASE("reset is deterministic per seed and stays in the box") {
  ArenaConfig cfg;
  for (int trial = 0; trial < 1000; ++trial) {
    Rng rng(4000 + trial);
    const auto st = arena::arena_reset(cfg, rng);
    for (const auto& p : st.pos) {
      CHECK(std::abs(p.x) <= cfg.half_extent);
      CHECK(std::abs(p.y) <= cfg.half_extent);
    }
  }
  Rng a(99), b(99);
  const auto s1 = arena::arena_reset(cfg, a);
  const auto s2 = arena::arena_reset(cfg, b);
  for (std::size_t i = 0; i < s1.pos.size(); ++i) {
    CHECK(s1.pos[i].x == s2.pos[i].x);
    CHECK(s1.pos[i].y == s2.pos[i].y);
  }
}

TEST_CASE("step: additive movement update, position advances by v'") {
  ArenaConfig cfg;
  cfg.v_cap = 0.1;  // cap out of the way: pure additive semantics
  Rng rng(5);
  auto st = arena::arena_reset(cfg, rng);
  std::vector<AgentAction> acts(3);
  acts[0] = {0.1, 0.1};
  const auto p0 = st.pos[0];
  const auto next = arena::arena_step(st, acts, AgentAction{}, cfg);
  CHECK(next.vel[0].x == doctest::Approx(0.1));
  CHECK(next.vel[0].y == doctest::Approx(0.1));
  CHECK(next.pos[0].x == doctest::Approx(p0.x + 0.1));
  CHECK(next.pos[0].y == doctest::Approx(p0.y + 0.1));
  CHECK(next.step == st.step + 1);

  // under the default cap the same action saturates the movement vector
  ArenaConfig slow;
  auto st2 = arena::arena_reset(slow, rng);
  const auto capped = arena::arena_step(st2, acts, AgentAction{}, slow);
  CHECK(capped.vel[0].x == doctest::Approx(slow.v_cap));
  CHECK(capped.vel[0].y == doctest::Approx(slow.v_cap));
}

TEST_CASE("step: forward-only clamp keeps v_y non-negative") {
  ArenaConfig cfg;
  Rng rng(6);
  auto st = arena::arena_reset(cfg, rng);
  std::vector<AgentAction> acts(3);
  acts[1] = {0.0, -0.05};  // out-of-box input is clamped at the v level
  const auto next = arena::arena_step(st, acts, AgentAction{}, cfg);
  CHECK(next.vel[1].y == 0.0);
}

TEST_CASE("random action sequences match a prefix-sum oracle") {
  ArenaConfig cfg;
  Rng rng(7);
  auto st = arena::arena_reset(cfg, rng);
  const auto origin = st;

  // independent bookkeeping of clamped velocities and their prefix sums
  std::vector<geom::Vec2> v_oracle(3, geom::Vec2{0, 0});
  std::vector<geom::Vec2> p_oracle;
  for (const auto& p : origin.pos) p_oracle.push_back(p);

  for (int t = 0; t < 100; ++t) {
    std::vector<AgentAction> acts(3);
    for (auto& a : acts) {
      a.dvx = rng.uniform(-0.1, 0.1);
      a.dvy = rng.uniform(0.0, 0.1);
    }
    const AgentAction ev{rng.uniform(-0.05, 0.05), rng.uniform(0.0, 0.05)};
    st = arena::arena_step(st, acts, ev, cfg);
    for (int i = 0; i < 3; ++i) {
      v_oracle[i].x = std::clamp(v_oracle[i].x + acts[i].dvx, -cfg.v_cap, cfg.v_cap);
      v_oracle[i].y = std::clamp(v_oracle[i].y + acts[i].dvy, 0.0, cfg.v_cap);
      p_oracle[i] += v_oracle[i];
    }
  }
  for (int i = 0; i < 3; ++i) {
    CHECK(st.pos[i].x == doctest::Approx(p_oracle[i].x).epsilon(1e-12));
    CHECK(st.pos[i].y == doctest::Approx(p_oracle[i].y).epsilon(1e-12));
    CHECK(st.vel[i].y >= 0.0);
  }
}

TEST_CASE("observations carry the Eq-1 layout and dimension") {
  ArenaConfig cfg;
  Rng rng(8);
  const auto st = arena::arena_reset(cfg, rng);
  const auto obs = arena::observe_agent(st, 0);
  REQUIRE(static_cast<int>(obs.size()) == arena::obs_dim(3));
  REQUIRE(obs.size() == 16u);
  // own relative position then own movement vector
  CHECK(obs[0] == doctest::Approx(st.pos[0].x - st.evader_pos.x));
  CHECK(obs[1] == doctest::Approx(st.pos[0].y - st.evader_pos.y));
  CHECK(obs[2] == 0.0);
  CHECK(obs[3] == 0.0);
  // other pursuers follow in cyclic order with their movement vectors
  CHECK(obs[4] == doctest::Approx(st.pos[1].x - st.evader_pos.x));
  CHECK(obs[5] == doctest::Approx(st.pos[1].y - st.evader_pos.y));
  CHECK(obs[8] == doctest::Approx(st.pos[2].x - st.evader_pos.x));
  // evader slot is the frame origin plus its movement vector
  CHECK(obs[obs.size() - 4] == 0.0);
  CHECK(obs[obs.size() - 3] == 0.0);
  CHECK(obs[obs.size() - 2] == doctest::Approx(st.evader_vel.x));
  CHECK(obs[obs.size() - 1] == doctest::Approx(st.evader_vel.y));
  const auto eobs = arena::observe_evader(st);
  REQUIRE(eobs.size() == obs.size());
}

TEST_CASE("scripted evader flees the nearest agent inside its box") {
  ArenaConfig cfg;
  Rng rng(9);
  auto st = arena::arena_reset(cfg, rng);
  const auto box = arena::evader_box(cfg);
  for (int t = 0; t < 50; ++t) {
    const auto a = arena::scripted_evader(st, cfg);
    CHECK(a.dvx >= box.x_lo - 1e-12);
    CHECK(a.dvx <= box.x_hi + 1e-12);
    CHECK(a.dvy >= box.y_lo - 1e-12);
    CHECK(a.dvy <= box.y_hi + 1e-12);
    st = arena::arena_step(st, std::vector<AgentAction>(3), a, cfg);
  }
}
