#pragma once

#include <vector>

#include "marlot/geometry.hpp"
#include "marlot/rng.hpp"

namespace marlot::arena {

/// Continuous 2-tuple action: change of the movement vector per step.
struct AgentAction {
  double dvx = 0.0;
  double dvy = 0.0;
};

/// Per-dimension action bounds; the pursuer box is [-0.1, 0.1] x [0, 0.1],
/// the evader's a scaled-down copy.
struct ActionBox {
  double x_lo = -0.1, x_hi = 0.1;
  double y_lo = 0.0, y_hi = 0.1;

  double x_mid() const { return 0.5 * (x_lo + x_hi); }
  double y_mid() const { return 0.5 * (y_lo + y_hi); }
  double x_half() const { return 0.5 * (x_hi - x_lo); }
  double y_half() const { return 0.5 * (y_hi - y_lo); }

  AgentAction clamp(AgentAction a) const;
};

/// Free-space training world: no road network, agents move along their
/// accumulated movement vectors.
struct ArenaConfig {
  int n = 3;
  double half_extent = 1.0;          // spawn box [-h, h]^2
  double evader_spawn_extent = 0.2;  // evader starts near the center
  // Movement caps. The action box is fixed; the accumulated movement vector
  // is clamped much tighter so that crossings of the d_enclosure window take
  // many steps and close pursuit is expressible at all under the
  // forward-only constraint.
  double v_cap = 0.04;
  double evader_ratio = 0.5;  // evader action/movement caps scale
  int episode_cap = 200;
  bool learned_evader = true;
};

struct ArenaState {
  std::vector<geom::Vec2> pos;
  std::vector<geom::Vec2> vel;  // movement vectors, v_y >= 0 throughout
  geom::Vec2 evader_pos;
  geom::Vec2 evader_vel;
  int step = 0;
};

int obs_dim(int n);  // 4n + 4: every entity contributes position + movement

ActionBox agent_box(const ArenaConfig& cfg);
ActionBox evader_box(const ArenaConfig& cfg);

/// Uniform agent placement, evader near the center, movement vectors zeroed.
/// Throws std::invalid_argument for n < 2.
ArenaState arena_reset(const ArenaConfig& cfg, Rng& rng);

/// v' = clamp(v + dv) with v_y kept non-negative (forward-only), p' = p + v'.
ArenaState arena_step(const ArenaState& state,
                      const std::vector<AgentAction>& actions,
                      const AgentAction& evader_action,
                      const ArenaConfig& cfg);

/// Observation layout (evader-relative positions, translation invariant):
/// pursuer i sees [own P, own v, (P_j, v_j) for the other pursuers in
/// cyclic order, evader P slot (zeros), evader v]; the evader sees
/// [own P slot (zeros), own v, (P_j, v_j) for all pursuers]. Both are
/// 4n + 4 wide.
std::vector<double> observe_agent(const ArenaState& state, int i);
std::vector<double> observe_evader(const ArenaState& state);

/// Fallback evader: flees the nearest pursuer (forward-only like everyone).
AgentAction scripted_evader(const ArenaState& state, const ArenaConfig& cfg);

}  // namespace marlot::arena
