#include "marlot/arena/arena.hpp"

#include <algorithm>
#include <cassert>
#include <limits>
#include <stdexcept>

namespace marlot::arena {

AgentAction ActionBox::clamp(AgentAction a) const {
  a.dvx = std::clamp(a.dvx, x_lo, x_hi);
  a.dvy = std::clamp(a.dvy, y_lo, y_hi);
  return a;
}

int obs_dim(int n) { return 4 * n + 4; }

ActionBox agent_box(const ArenaConfig&) { return ActionBox{}; }

ActionBox evader_box(const ArenaConfig& cfg) {
  const double r = cfg.evader_ratio;
  return ActionBox{-0.1 * r, 0.1 * r, 0.0, 0.1 * r};
}

ArenaState arena_reset(const ArenaConfig& cfg, Rng& rng) {
  if (cfg.n < 2) {
    throw std::invalid_argument("arena needs at least 2 agents");
  }
  ArenaState st;
  st.pos.resize(cfg.n);
  st.vel.assign(cfg.n, geom::Vec2{0.0, 0.0});
  for (auto& p : st.pos) {
    p.x = rng.uniform(-cfg.half_extent, cfg.half_extent);
    p.y = rng.uniform(-cfg.half_extent, cfg.half_extent);
  }
  st.evader_pos.x = rng.uniform(-cfg.evader_spawn_extent, cfg.evader_spawn_extent);
  st.evader_pos.y = rng.uniform(-cfg.evader_spawn_extent, cfg.evader_spawn_extent);
  st.evader_vel = geom::Vec2{0.0, 0.0};
  return st;
}

ArenaState arena_step(const ArenaState& state,
                      const std::vector<AgentAction>& actions,
                      const AgentAction& evader_action,
                      const ArenaConfig& cfg) {
  assert(static_cast<int>(actions.size()) == cfg.n);
  ArenaState next = state;
  for (int i = 0; i < cfg.n; ++i) {
    auto& v = next.vel[i];
    v.x = std::clamp(v.x + actions[i].dvx, -cfg.v_cap, cfg.v_cap);
    v.y = std::clamp(v.y + actions[i].dvy, 0.0, cfg.v_cap);
    next.pos[i] += v;
  }
  const double e_cap = cfg.v_cap * cfg.evader_ratio;
  auto& ev = next.evader_vel;
  ev.x = std::clamp(ev.x + evader_action.dvx, -e_cap, e_cap);
  ev.y = std::clamp(ev.y + evader_action.dvy, 0.0, e_cap);
  next.evader_pos += ev;
  next.step = state.step + 1;
  return next;
}

std::vector<double> observe_agent(const ArenaState& state, int i) {
  const int n = static_cast<int>(state.pos.size());
  std::vector<double> obs;
  obs.reserve(obs_dim(n));
  const geom::Vec2 rel = state.pos[i] - state.evader_pos;
  obs.push_back(rel.x);
  obs.push_back(rel.y);
  obs.push_back(state.vel[i].x);
  obs.push_back(state.vel[i].y);
  for (int k = 1; k < n; ++k) {
    const int j = (i + k) % n;
    const geom::Vec2 other = state.pos[j] - state.evader_pos;
    obs.push_back(other.x);
    obs.push_back(other.y);
    obs.push_back(state.vel[j].x);
    obs.push_back(state.vel[j].y);
  }
  obs.push_back(0.0);  // evader slot (relative frame origin)
  obs.push_back(0.0);
  obs.push_back(state.evader_vel.x);
  obs.push_back(state.evader_vel.y);
  return obs;
}

std::vector<double> observe_evader(const ArenaState& state) {
  const int n = static_cast<int>(state.pos.size());
  std::vector<double> obs;
  obs.reserve(obs_dim(n));
  obs.push_back(0.0);
  obs.push_back(0.0);
  obs.push_back(state.evader_vel.x);
  obs.push_back(state.evader_vel.y);
  for (int k = 0; k < n; ++k) {
    const geom::Vec2 other = state.pos[k] - state.evader_pos;
    obs.push_back(other.x);
    obs.push_back(other.y);
    obs.push_back(state.vel[k].x);
    obs.push_back(state.vel[k].y);
  }
  return obs;
}

AgentAction scripted_evader(const ArenaState& state, const ArenaConfig& cfg) {
  double best = std::numeric_limits<double>::max();
  geom::Vec2 nearest;
  for (const auto& p : state.pos) {
    const double d = geom::distance(p, state.evader_pos);
    if (d < best) {
      best = d;
      nearest = p;
    }
  }
  const geom::Vec2 away = (state.evader_pos - nearest).normalized();
  const auto box = evader_box(cfg);
  // steer the movement vector toward the flee direction
  const double e_cap = cfg.v_cap * cfg.evader_ratio;
  AgentAction a;
  a.dvx = std::clamp(away.x * e_cap - state.evader_vel.x, box.x_lo, box.x_hi);
  a.dvy = std::clamp(std::max(0.0, away.y) * e_cap - state.evader_vel.y,
                     box.y_lo, box.y_hi);
  return a;
}

}  // namespace marlot::arena
