#include "marlot/sim/collision.hpp"

#include <limits>
#include <stdexcept>

namespace marlot::sim {

std::vector<std::pair<int, int>> detect_collisions(const WorldState& world) {
  const auto vehicles = world.all();
  std::vector<std::pair<int, int>> out;
  for (std::size_t i = 0; i < vehicles.size(); ++i) {
    for (std::size_t j = i + 1; j < vehicles.size(); ++j) {
      if (geom::obb_overlap(vehicles[i]->footprint(), vehicles[j]->footprint())) {
        const int a = vehicles[i]->id;
        const int b = vehicles[j]->id;
        out.emplace_back(std::min(a, b), std::max(a, b));
      }
    }
  }
  return out;
}

double min_neighbor_distance(const WorldState& world, int vehicle_id) {
  const auto vehicles = world.all();
  if (vehicles.size() < 2) {
    throw std::invalid_argument("min_neighbor_distance needs >= 2 vehicles");
  }
  const VehicleState& self = world.vehicle(vehicle_id);
  double best = std::numeric_limits<double>::max();
  for (const auto* v : vehicles) {
    if (v->id == vehicle_id) continue;
    best = std::min(best, geom::distance(self.position, v->position));
  }
  return best;
}

double min_neighbor_clearance(const WorldState& world, int vehicle_id) {
  const auto vehicles = world.all();
  if (vehicles.size() < 2) {
    throw std::invalid_argument("min_neighbor_clearance needs >= 2 vehicles");
  }
  const VehicleState& self = world.vehicle(vehicle_id);
  double best = std::numeric_limits<double>::max();
  for (const auto* v : vehicles) {
    if (v->id == vehicle_id) continue;
    best = std::min(best, geom::obb_clearance(self.footprint(), v->footprint()));
  }
  return best;
}

int count_svs_within(const WorldState& world, double threshold) {
  int count = 0;
  const auto ego_box = world.ego.footprint();
  for (const auto& sv : world.surrounding) {
    if (geom::obb_clearance(ego_box, sv.footprint()) <= threshold) ++count;
  }
  return count;
}

bool is_within_boundary(const VehicleState& state, const RoadNetwork& net) {
  const auto box = state.footprint();
  for (const auto& corner : box.corners()) {
    if (!within_corridor(net, corner)) return false;
  }
  return within_corridor(net, state.position);
}

}  // namespace marlot::sim
