#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "marlot/geometry.hpp"

namespace marlot::sim {

enum class BlockKind {
  Straight,
  Merge,
  Intersection,
  TIntersection,
  Circular,
  Roundabout,
};

std::string to_string(BlockKind kind);
std::optional<BlockKind> block_kind_from_string(const std::string& name);

struct BlockSpec {
  BlockKind kind = BlockKind::Straight;
  double length = 120.0;  // nominal length along the road reference path
  double radius = 40.0;   // curve radius for Circular / Roundabout
};

struct Lane {
  int id = 0;
  geom::Polyline center;
  double width = 3.5;
};

struct RoadError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Drivable network: `lanes` are the through lanes every vehicle is routed
/// on (id 0 = leftmost, increasing rightward, one polyline spanning all
/// blocks). `aux_lanes` are merge ramps and intersection stubs; they extend
/// the drivable corridor but carry no traffic here.
struct RoadNetwork {
  std::vector<Lane> lanes;
  std::vector<Lane> aux_lanes;
  int lane_count = 0;
  double lane_width = 3.5;
  double destination_margin = 5.0;  // destination: s >= lane length - margin
  double spawn_min_s = 5.0;
  double spawn_max_s = 40.0;
  /// Per-lane arc length of each block boundary, lane-major:
  /// block_boundaries[lane][b] = s at the end of block b on that lane.
  std::vector<std::vector<double>> block_boundaries;

  const Lane& lane_by_id(int id) const;
  std::optional<int> left_of(int lane_id) const;
  std::optional<int> right_of(int lane_id) const;
  bool at_destination(int lane_id, double s) const;
};

struct FrenetPose {
  int lane_id = 0;
  double s = 0.0;
  double d = 0.0;
};

struct RoadConfig {
  double lane_width = 3.5;
  double curve_step = 0.5;     // polyline sampling on curves, meters
  double straight_step = 5.0;  // sampling on straights
};

/// Builds a connected network from 1..3 chained blocks. Identical inputs
/// (spec, lane_count, seed) produce identical geometry.
RoadNetwork build_road(const std::vector<BlockSpec>& blocks, int lane_count,
                       std::uint64_t seed, const RoadConfig& cfg = {});

/// Projects a world point onto the nearest through lane. Points farther than
/// two lane widths from every centerline are off-network -> nullopt.
std::optional<FrenetPose> frenet_of(const RoadNetwork& net, const geom::Vec2& p,
                                    std::optional<double> hint_s = std::nullopt);

/// Frenet -> world on a given lane.
geom::Vec2 world_of(const RoadNetwork& net, int lane_id, double s, double d);

/// True when p lies within the drivable corridor (any lane, half-width band
/// around its centerline, auxiliary lanes included).
bool within_corridor(const RoadNetwork& net, const geom::Vec2& p);

}  // namespace marlot::sim
