#pragma once

#include <utility>
#include <vector>

#include "marlot/sim/road.hpp"
#include "marlot/sim/vehicle.hpp"

namespace marlot::sim {

/// All overlapping vehicle pairs (id_a < id_b), separating-axis test on the
/// oriented footprints. Symmetric by construction, never self-pairs.
std::vector<std::pair<int, int>> detect_collisions(const WorldState& world);

/// Minimum Euclidean center distance from `vehicle_id` to any other vehicle.
/// Requires at least two vehicles in the world.
double min_neighbor_distance(const WorldState& world, int vehicle_id);

/// Minimum surface clearance (0 when overlapping) from `vehicle_id` to any
/// other vehicle; used by the violation oracle's proximity attribution.
double min_neighbor_clearance(const WorldState& world, int vehicle_id);

/// Number of surrounding vehicles whose footprint clearance to the ego is at
/// most `threshold`.
int count_svs_within(const WorldState& world, double threshold);

/// True when the vehicle footprint (four corners and center) lies inside the
/// union of lane corridors.
bool is_within_boundary(const VehicleState& state, const RoadNetwork& net);

}  // namespace marlot::sim
