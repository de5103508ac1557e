#include "marlot/arena/reward.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace marlot::arena {

EnclosureGeometry enclosure_geometry(const std::vector<geom::Vec2>& agents,
                                     const geom::Vec2& evader) {
  EnclosureGeometry g;
  const int n = static_cast<int>(agents.size());
  g.min_dist = std::numeric_limits<double>::max();
  g.max_dist = 0.0;
  for (const auto& p : agents) {
    const double d = geom::distance(p, evader);
    g.min_dist = std::min(g.min_dist, d);
    g.max_dist = std::max(g.max_dist, d);
  }
  if (n < 3) {
    g.degenerate = true;
    return g;
  }

  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::vector<double> angle(n);
  for (int i = 0; i < n; ++i) {
    const geom::Vec2 r = agents[i] - evader;
    angle[i] = std::atan2(r.y, r.x);
  }
  std::sort(order.begin(), order.end(),
            [&angle](int a, int b) { return angle[a] < angle[b]; });

  std::vector<geom::Vec2> ring(n);
  for (int i = 0; i < n; ++i) ring[i] = agents[order[i]];

  g.tri_areas.resize(n);
  for (int i = 0; i < n; ++i) {
    g.tri_areas[i] = geom::triangle_area(ring[i], ring[(i + 1) % n], evader);
  }
  g.tri_sum = std::accumulate(g.tri_areas.begin(), g.tri_areas.end(), 0.0);
  g.hull_area = geom::polygon_area(ring);
  g.degenerate = g.hull_area <= 1e-12;
  return g;
}

bool enclosed(const EnclosureGeometry& g, double rel_tol) {
  if (g.degenerate) return false;
  return g.tri_sum - g.hull_area <= rel_tol * g.hull_area;
}

namespace {

double proximity_term(const geom::Vec2& vel, const geom::Vec2& agent,
                      const geom::Vec2& evader, const RewardWeights& w) {
  const double vn = vel.norm();
  if (vn == 0.0) return 0.0;
  const geom::Vec2 dir =
      w.literal_eq6_sign ? agent - evader : evader - agent;
  const double cos_theta = vel.dot(dir) / (vn * dir.norm() + w.cos_eps);
  return vn * cos_theta;
}

}  // namespace

RewardResult agent_reward(const ArenaState& prev, const ArenaState& next,
                          const RewardWeights& w) {
  const int n = static_cast<int>(next.pos.size());
  RewardResult res;
  res.per_agent.resize(n);

  for (int i = 0; i < n; ++i) {
    res.per_agent[i].r_near =
        proximity_term(next.vel[i], next.pos[i], next.evader_pos, w);
  }

  double track = 0.0, encircle = 0.0, full = 0.0, finish = 0.0;

  if (n >= 3) {
    const auto g = enclosure_geometry(next.pos, next.evader_pos);
    const bool inside = enclosed(g, w.area_rel_tol);
    if (!inside) {
      if (g.min_dist >= w.d_enclosure) {
        // Stage 1: still approaching from outside
        double sum = 0.0;
        for (const auto& p : next.pos) sum += geom::distance(p, next.evader_pos);
        track = -sum / g.max_dist;
      } else {
        // Stage 2: partial enclosure, shrink the fan-area mismatch
        encircle = -std::log(g.tri_sum - g.hull_area + 1.0) / n;
      }
    } else {
      if (g.max_dist > w.d_enclosure) {
        // Stage 3: enclosed but not yet tight; reward closing in
        double sum_prev = 0.0, sum_next = 0.0;
        for (int i = 0; i < n; ++i) {
          sum_prev += geom::distance(prev.pos[i], prev.evader_pos);
          sum_next += geom::distance(next.pos[i], next.evader_pos);
        }
        full = std::exp((sum_prev - sum_next) / n);
      } else {
        finish = w.completion;
        res.done = true;
      }
    }
  } else {
    // n == 2: area terms undefined; distance-only completion
    double max_dist = 0.0;
    for (const auto& p : next.pos) {
      max_dist = std::max(max_dist, geom::distance(p, next.evader_pos));
    }
    if (max_dist <= w.d_enclosure) {
      finish = w.completion;
      res.done = true;
    }
  }

  for (auto& terms : res.per_agent) {
    terms.r_track = track;
    terms.r_encircle = encircle;
    terms.r_full = full;
    terms.r_finish = finish;
    terms.total = w.mu1 * terms.r_near +
                  w.mu2 * (track + encircle + full) + w.mu3 * finish;
  }
  return res;
}

double ego_reward(const ArenaState& prev, const ArenaState& next) {
  double sum_prev = 0.0, sum_next = 0.0;
  const int n = static_cast<int>(next.pos.size());
  for (int i = 0; i < n; ++i) {
    sum_prev += geom::distance(prev.pos[i], prev.evader_pos);
    sum_next += geom::distance(next.pos[i], next.evader_pos);
  }
  return sum_next - sum_prev;
}

}  // namespace marlot::arena
