#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "marlot/fuzzer/orchestrator.hpp"
#include "marlot/harness/violation.hpp"
#include "marlot/sim/vehicle.hpp"

namespace marlot::harness {

struct TraceError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct TraceVehicle {
  int id = 0;
  double x = 0.0, y = 0.0;
  double heading = 0.0;
  double speed = 0.0;
  int lane = 0;
  double s = 0.0, d = 0.0;
  bool crashed = false;
};

struct TraceCommand {
  int sv_id = 0;
  Maneuver maneuver = Maneuver::Decelerate;
  std::string owner;  // "marl" | "pattern"
  std::string pattern;
  bool constraint_override = false;
};

struct TraceStep {
  long step = 0;
  std::vector<TraceVehicle> vehicles;  // ego first
  double sut_accel = 0.0;
  std::string sut_intent;
  std::vector<TraceCommand> commands;
};

/// Append-only record of one episode: header, per-step records, end marker.
/// Serialized as line-delimited JSON with a stable field order so that
/// byte-level hashes are meaningful.
struct EpisodeTrace {
  nlohmann::ordered_json header;
  std::vector<TraceStep> steps;
  std::string outcome;
  std::optional<ViolationRecord> violation;
  bool poisoned = false;  // controller aborted mid-episode

  std::uint64_t hash() const;  // FNV-1a over the serialized form
};

std::string trace_to_jsonl(const EpisodeTrace& trace);
EpisodeTrace trace_from_jsonl(const std::string& text);

void export_trace(const EpisodeTrace& trace, const std::string& path);
EpisodeTrace parse_trace(const std::string& path);

}  // namespace marlot::harness
