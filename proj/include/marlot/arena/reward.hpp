#pragma once

#include <vector>

#include "marlot/arena/arena.hpp"

namespace marlot::arena {

struct RewardWeights {
  double mu1 = 0.7;
  double mu2 = 0.01;
  double mu3 = 0.5;
  double completion = 10.0;   // I, paid once when the enclosure closes
  double d_enclosure = 0.3;
  double cos_eps = 0.001;     // denominator guard in the alignment term
  double area_rel_tol = 1e-6; // fan-area equality tolerance, relative
  /// The printed proximity term rewards movement away from the evader; the
  /// default corrects the direction vector to match the chase intent. Set
  /// to true to evaluate the formula exactly as printed.
  bool literal_eq6_sign = false;
};

/// Triangle-fan geometry around the evader: agents ordered by polar angle,
/// per-agent triangles on cyclically adjacent pairs, hull area of the
/// ordered polygon. The fan sum equals the hull area exactly when the evader
/// lies inside the polygon.
struct EnclosureGeometry {
  std::vector<double> tri_areas;
  double tri_sum = 0.0;
  double hull_area = 0.0;
  double min_dist = 0.0;
  double max_dist = 0.0;
  bool degenerate = false;  // collinear agents; treated as "outside"
};

EnclosureGeometry enclosure_geometry(const std::vector<geom::Vec2>& agents,
                                     const geom::Vec2& evader);

bool enclosed(const EnclosureGeometry& g, double rel_tol);

struct AgentRewardTerms {
  double r_near = 0.0;
  double r_track = 0.0;
  double r_encircle = 0.0;
  double r_full = 0.0;
  double r_finish = 0.0;
  double total = 0.0;
};

struct RewardResult {
  std::vector<AgentRewardTerms> per_agent;
  bool done = false;  // completion reward paid; episode concludes
};

/// Rewards for the transition prev -> next, evaluated on the configuration
/// just reached. With two agents the area phases are undefined and the
/// reward reduces to the proximity term plus a distance-only finish.
RewardResult agent_reward(const ArenaState& prev, const ArenaState& next,
                          const RewardWeights& w);

/// Competition reward for the evader: growth of the summed agent distances.
double ego_reward(const ArenaState& prev, const ArenaState& next);

}  // namespace marlot::arena
