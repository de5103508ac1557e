#include "marlot/sim/road.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "marlot/rng.hpp"

namespace marlot::sim {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr int kAuxIdBase = 100;

struct Cursor {
  geom::Vec2 pos;
  double heading = 0.0;

  geom::Vec2 dir() const { return {std::cos(heading), std::sin(heading)}; }
  geom::Vec2 left() const { return dir().left(); }
};

// Per-lane point accumulator while chaining blocks.
struct Builder {
  std::vector<std::vector<geom::Vec2>> lane_pts;
  std::vector<Lane> aux;
  int next_aux_id = kAuxIdBase;

  void append(int lane, const std::vector<geom::Vec2>& pts) {
    auto& dst = lane_pts[lane];
    for (const auto& p : pts) {
      if (!dst.empty() && geom::distance(dst.back(), p) < 1e-9) continue;
      dst.push_back(p);
    }
  }

  void add_aux(std::vector<geom::Vec2> pts, double width) {
    Lane lane;
    lane.id = next_aux_id++;
    lane.center = geom::Polyline(std::move(pts));
    lane.width = width;
    aux.push_back(std::move(lane));
  }
};

std::vector<double> lane_offsets(int lane_count, double width) {
  // id 0 = leftmost; positive offset = left of the road reference path
  std::vector<double> offs(lane_count);
  for (int j = 0; j < lane_count; ++j) {
    offs[j] = ((lane_count - 1) * 0.5 - j) * width;
  }
  return offs;
}

std::vector<geom::Vec2> straight_points(const Cursor& c, double offset,
                                        double from, double to, double step) {
  std::vector<geom::Vec2> pts;
  const geom::Vec2 base = c.pos + c.left() * offset;
  const int n = std::max(1, static_cast<int>(std::ceil((to - from) / step)));
  for (int i = 0; i <= n; ++i) {
    const double s = from + (to - from) * (static_cast<double>(i) / n);
    pts.push_back(base + c.dir() * s);
  }
  return pts;
}

std::vector<geom::Vec2> arc_points(const Cursor& c, double offset, double radius,
                                   double angle, double turn_sign, double step) {
  // Exact circle samples: turn_sign +1 = left turn, -1 = right turn.
  const geom::Vec2 center = c.pos + c.left() * (turn_sign * radius);
  const double r_eff = offset - turn_sign * radius;
  const int n = std::max(2, static_cast<int>(std::ceil(radius * angle / step)));
  std::vector<geom::Vec2> pts;
  for (int i = 0; i <= n; ++i) {
    const double h = c.heading + turn_sign * angle * (static_cast<double>(i) / n);
    const geom::Vec2 left_h{-std::sin(h), std::cos(h)};
    pts.push_back(center + left_h * r_eff);
  }
  return pts;
}

Cursor arc_end(const Cursor& c, double radius, double angle, double turn_sign) {
  const geom::Vec2 center = c.pos + c.left() * (turn_sign * radius);
  const double h = c.heading + turn_sign * angle;
  const geom::Vec2 left_h{-std::sin(h), std::cos(h)};
  return Cursor{center + left_h * (-turn_sign * radius), h};
}

}  // namespace

std::string to_string(BlockKind kind) {
  switch (kind) {
    case BlockKind::Straight: return "straight";
    case BlockKind::Merge: return "merge";
    case BlockKind::Intersection: return "intersection";
    case BlockKind::TIntersection: return "t_intersection";
    case BlockKind::Circular: return "circular";
    case BlockKind::Roundabout: return "roundabout";
  }
  return "unknown";
}

std::optional<BlockKind> block_kind_from_string(const std::string& name) {
  if (name == "straight") return BlockKind::Straight;
  if (name == "merge") return BlockKind::Merge;
  if (name == "intersection") return BlockKind::Intersection;
  if (name == "t_intersection") return BlockKind::TIntersection;
  if (name == "circular") return BlockKind::Circular;
  if (name == "roundabout") return BlockKind::Roundabout;
  return std::nullopt;
}

const Lane& RoadNetwork::lane_by_id(int id) const {
  for (const auto& lane : lanes) {
    if (lane.id == id) return lane;
  }
  for (const auto& lane : aux_lanes) {
    if (lane.id == id) return lane;
  }
  throw RoadError("unknown lane id " + std::to_string(id));
}

std::optional<int> RoadNetwork::left_of(int lane_id) const {
  if (lane_id <= 0 || lane_id >= lane_count) return std::nullopt;
  return lane_id - 1;
}

std::optional<int> RoadNetwork::right_of(int lane_id) const {
  if (lane_id < 0 || lane_id >= lane_count - 1) return std::nullopt;
  return lane_id + 1;
}

bool RoadNetwork::at_destination(int lane_id, double s) const {
  if (lane_id < 0 || lane_id >= lane_count) return false;
  return s >= lanes[lane_id].center.length() - destination_margin;
}

RoadNetwork build_road(const std::vector<BlockSpec>& blocks, int lane_count,
                       std::uint64_t seed, const RoadConfig& cfg) {
  if (blocks.empty() || blocks.size() > 3) {
    throw RoadError("block count must be in [1, 3]");
  }
  for (const auto& b : blocks) {
    if (b.kind == BlockKind::Merge && lane_count < 2) {
      throw RoadError("merge block requires at least 2 lanes");
    }
  }
  if (lane_count < 2 || lane_count > 4) {
    throw RoadError("lane_count must be in [2, 4]");
  }

  const double w = cfg.lane_width;
  const auto offs = lane_offsets(lane_count, w);
  const double half_road = lane_count * 0.5 * w;
  Rng rng(seed);

  Builder bld;
  bld.lane_pts.resize(lane_count);
  Cursor cur{{0.0, 0.0}, 0.0};
  std::vector<std::vector<double>> boundaries(lane_count);

  for (const auto& block : blocks) {
    switch (block.kind) {
      case BlockKind::Straight: {
        for (int j = 0; j < lane_count; ++j) {
          bld.append(j, straight_points(cur, offs[j], 0.0, block.length,
                                        cfg.straight_step));
        }
        cur.pos += cur.dir() * block.length;
        break;
      }
      case BlockKind::Merge: {
        // Through lanes run straight; an on-ramp parallels the rightmost
        // lane, blends into it over [0.4L, 0.8L] and ends there.
        for (int j = 0; j < lane_count; ++j) {
          bld.append(j, straight_points(cur, offs[j], 0.0, block.length,
                                        cfg.straight_step));
        }
        const double ramp_off = offs[lane_count - 1] - w;
        std::vector<geom::Vec2> ramp;
        const int n = std::max(8, static_cast<int>(block.length / 2.0));
        for (int i = 0; i <= n; ++i) {
          const double t = block.length * (static_cast<double>(i) / n);
          double lat = ramp_off;
          if (t > 0.8 * block.length) break;
          if (t > 0.4 * block.length) {
            const double u = (t - 0.4 * block.length) / (0.4 * block.length);
            const double blend = u * u * (3.0 - 2.0 * u);
            lat = ramp_off + (offs[lane_count - 1] - ramp_off) * blend;
          }
          ramp.push_back(cur.pos + cur.dir() * t + cur.left() * lat);
        }
        bld.add_aux(std::move(ramp), w);
        cur.pos += cur.dir() * block.length;
        break;
      }
      case BlockKind::Intersection:
      case BlockKind::TIntersection: {
        for (int j = 0; j < lane_count; ++j) {
          bld.append(j, straight_points(cur, offs[j], 0.0, block.length,
                                        cfg.straight_step));
        }
        // Crossing stubs at mid-block: corridor geometry only.
        const geom::Vec2 mid = cur.pos + cur.dir() * (block.length * 0.5);
        const double stub_len = 25.0;
        const geom::Vec2 up = cur.left();
        std::vector<geom::Vec2> left_stub = {mid + up * (half_road + stub_len),
                                             mid + up * (half_road - 1.0)};
        bld.add_aux(std::move(left_stub), w);
        if (block.kind == BlockKind::Intersection) {
          std::vector<geom::Vec2> right_stub = {
              mid - up * (half_road - 1.0), mid - up * (half_road + stub_len)};
          bld.add_aux(std::move(right_stub), w);
        }
        cur.pos += cur.dir() * block.length;
        break;
      }
      case BlockKind::Circular: {
        // Quarter-circle curve; turn direction drawn from the seed stream.
        const double turn = rng.bernoulli(0.5) ? 1.0 : -1.0;
        const double angle = kPi / 2.0;
        if (block.radius - half_road < 2.0) {
          throw RoadError("curve radius too small for lane count");
        }
        for (int j = 0; j < lane_count; ++j) {
          bld.append(j, arc_points(cur, offs[j], block.radius, angle, turn,
                                   cfg.curve_step));
        }
        cur = arc_end(cur, block.radius, angle, turn);
        break;
      }
      case BlockKind::Roundabout: {
        // Entry stub, half circulation around the island, exit stub.
        if (block.radius - half_road < 2.0) {
          throw RoadError("roundabout radius too small for lane count");
        }
        const double stub = std::max(10.0, block.length * 0.25);
        for (int j = 0; j < lane_count; ++j) {
          bld.append(j, straight_points(cur, offs[j], 0.0, stub,
                                        cfg.straight_step));
        }
        cur.pos += cur.dir() * stub;
        for (int j = 0; j < lane_count; ++j) {
          bld.append(j, arc_points(cur, offs[j], block.radius, kPi, 1.0,
                                   cfg.curve_step));
        }
        cur = arc_end(cur, block.radius, kPi, 1.0);
        for (int j = 0; j < lane_count; ++j) {
          bld.append(j, straight_points(cur, offs[j], 0.0, stub,
                                        cfg.straight_step));
        }
        cur.pos += cur.dir() * stub;
        break;
      }
      default:
        throw RoadError("unknown block kind");
    }
    for (int j = 0; j < lane_count; ++j) {
      geom::Polyline tmp(bld.lane_pts[j]);
      boundaries[j].push_back(tmp.length());
    }
  }

  RoadNetwork net;
  net.lane_count = lane_count;
  net.lane_width = w;
  net.block_boundaries = std::move(boundaries);
  for (int j = 0; j < lane_count; ++j) {
    Lane lane;
    lane.id = j;
    lane.width = w;
    lane.center = geom::Polyline(std::move(bld.lane_pts[j]));
    net.lanes.push_back(std::move(lane));
  }
  net.aux_lanes = std::move(bld.aux);
  double min_len = net.lanes.front().center.length();
  for (const auto& lane : net.lanes) min_len = std::min(min_len, lane.center.length());
  net.spawn_max_s = std::min(40.0, 0.3 * min_len);
  return net;
}

std::optional<FrenetPose> frenet_of(const RoadNetwork& net, const geom::Vec2& p,
                                    std::optional<double> hint_s) {
  FrenetPose best;
  double best_dist = std::numeric_limits<double>::max();
  for (const auto& lane : net.lanes) {
    const auto proj = lane.center.project(p, hint_s);
    if (proj.distance < best_dist) {
      best_dist = proj.distance;
      best = FrenetPose{lane.id, proj.s, proj.d};
    }
  }
  if (best_dist > 2.0 * net.lane_width) return std::nullopt;
  return best;
}

geom::Vec2 world_of(const RoadNetwork& net, int lane_id, double s, double d) {
  return net.lane_by_id(lane_id).center.offset_point(s, d);
}

bool within_corridor(const RoadNetwork& net, const geom::Vec2& p) {
  for (const auto& lane : net.lanes) {
    if (lane.center.distance_to(p) <= lane.width * 0.5) return true;
  }
  for (const auto& lane : net.aux_lanes) {
    if (lane.center.distance_to(p) <= lane.width * 0.5) return true;
  }
  return false;
}

}  // namespace marlot::sim
