#include "marlot/harness/violation.hpp"

#include <cmath>

namespace marlot::harness {

std::string to_string(ViolationKind kind) {
  switch (kind) {
    case ViolationKind::MultiVehicleCrash: return "multi_vehicle_crash";
    case ViolationKind::AbnormalReverse: return "abnormal_reverse";
    case ViolationKind::AbnormalOffRoad: return "abnormal_off_road";
    case ViolationKind::AbnormalStall: return "abnormal_stall";
  }
  return "unknown";
}

std::optional<ViolationRecord> ViolationMonitor::update(
    const sim::WorldState& world, const sim::RoadNetwork& net,
    const std::vector<std::pair<int, int>>& collisions) {
  const auto& ego = world.ego;

  if (ego.speed < params_.reverse_speed_threshold) {
    reverse_run_ += 1;
  } else {
    reverse_run_ = 0;
  }
  if (std::abs(ego.speed) < params_.stall_speed_threshold) {
    stall_run_ += 1;
  } else {
    stall_run_ = 0;
  }

  const int proximity = sim::count_svs_within(world, params_.d_constraint);
  if (proximity < 2) return std::nullopt;

  const auto make = [&](ViolationKind kind) {
    ViolationRecord rec;
    rec.kind = kind;
    rec.time_s = static_cast<double>(world.step) * world.dt;
    rec.svs_within_constraint = proximity;
    rec.vehicle_ids.push_back(ego.id);
    return rec;
  };

  for (const auto& [a, b] : collisions) {
    if (a == ego.id || b == ego.id) {
      auto rec = make(ViolationKind::MultiVehicleCrash);
      rec.vehicle_ids.push_back(a == ego.id ? b : a);
      return rec;
    }
  }
  if (!sim::is_within_boundary(ego, net)) {
    return make(ViolationKind::AbnormalOffRoad);
  }
  if (reverse_run_ >= params_.reverse_steps) {
    return make(ViolationKind::AbnormalReverse);
  }
  if (stall_run_ >= params_.stall_steps) {
    return make(ViolationKind::AbnormalStall);
  }
  return std::nullopt;
}

}  // namespace marlot::harness
