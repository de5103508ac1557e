#pragma once

#include <optional>
#include <string>
#include <vector>

#include "marlot/sim/collision.hpp"

namespace marlot::harness {

enum class ViolationKind {
  MultiVehicleCrash,
  AbnormalReverse,
  AbnormalOffRoad,
  AbnormalStall,
};

std::string to_string(ViolationKind kind);

struct ViolationRecord {
  ViolationKind kind = ViolationKind::MultiVehicleCrash;
  double time_s = 0.0;
  std::vector<int> vehicle_ids;   // ego plus the implicated SVs
  int svs_within_constraint = 0;  // proximity count at detection time
  std::string trace_ref;
};

struct ViolationParams {
  double d_constraint = 2.0;  // proximity attribution threshold (clearance)
  int stall_steps = 100;
  int reverse_steps = 5;
  double reverse_speed_threshold = -0.1;
  double stall_speed_threshold = 0.1;
};

/// Stateful per-episode violation oracle. Every kind additionally requires
/// at least two surrounding vehicles within d_constraint of the ego at
/// detection time; the interplay condition is what separates a safety
/// violation from an ordinary mishap.
class ViolationMonitor {
 public:
  explicit ViolationMonitor(const ViolationParams& params) : params_(params) {}

  std::optional<ViolationRecord> update(
      const sim::WorldState& world, const sim::RoadNetwork& net,
      const std::vector<std::pair<int, int>>& collisions);

 private:
  ViolationParams params_;
  int reverse_run_ = 0;
  int stall_run_ = 0;
};

}  // namespace marlot::harness
