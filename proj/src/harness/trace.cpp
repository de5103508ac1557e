#include "marlot/harness/trace.hpp"

#include <fstream>
#include <sstream>

namespace marlot::harness {

namespace {

nlohmann::ordered_json vehicle_json(const TraceVehicle& v) {
  return {{"id", v.id},     {"x", v.x},        {"y", v.y},
          {"heading", v.heading}, {"speed", v.speed}, {"lane", v.lane},
          {"s", v.s},       {"d", v.d},        {"crashed", v.crashed}};
}

TraceVehicle vehicle_from_json(const nlohmann::json& j) {
  TraceVehicle v;
  v.id = j.at("id").get<int>();
  v.x = j.at("x").get<double>();
  v.y = j.at("y").get<double>();
  v.heading = j.at("heading").get<double>();
  v.speed = j.at("speed").get<double>();
  v.lane = j.at("lane").get<int>();
  v.s = j.at("s").get<double>();
  v.d = j.at("d").get<double>();
  v.crashed = j.at("crashed").get<bool>();
  return v;
}

Maneuver maneuver_from_string(const std::string& name) {
  for (const Maneuver m : kAllManeuvers) {
    if (name == to_string(m)) return m;
  }
  throw TraceError("unknown maneuver in trace: " + name);
}

nlohmann::ordered_json violation_json(const ViolationRecord& rec) {
  return {{"kind", to_string(rec.kind)},
          {"time_s", rec.time_s},
          {"vehicle_ids", rec.vehicle_ids},
          {"svs_within_constraint", rec.svs_within_constraint},
          {"trace_ref", rec.trace_ref}};
}

ViolationRecord violation_from_json(const nlohmann::json& j) {
  ViolationRecord rec;
  const std::string kind = j.at("kind").get<std::string>();
  if (kind == "multi_vehicle_crash") rec.kind = ViolationKind::MultiVehicleCrash;
  else if (kind == "abnormal_reverse") rec.kind = ViolationKind::AbnormalReverse;
  else if (kind == "abnormal_off_road") rec.kind = ViolationKind::AbnormalOffRoad;
  else if (kind == "abnormal_stall") rec.kind = ViolationKind::AbnormalStall;
  else throw TraceError("unknown violation kind: " + kind);
  rec.time_s = j.at("time_s").get<double>();
  rec.vehicle_ids = j.at("vehicle_ids").get<std::vector<int>>();
  rec.svs_within_constraint = j.at("svs_within_constraint").get<int>();
  rec.trace_ref = j.at("trace_ref").get<std::string>();
  return rec;
}

}  // namespace

std::string trace_to_jsonl(const EpisodeTrace& trace) {
  std::ostringstream os;
  nlohmann::ordered_json head;
  head["type"] = "header";
  head["config"] = trace.header;
  os << head.dump() << '\n';
  for (const auto& st : trace.steps) {
    nlohmann::ordered_json j;
    j["type"] = "step";
    j["step"] = st.step;
    auto vehicles = nlohmann::ordered_json::array();
    for (const auto& v : st.vehicles) vehicles.push_back(vehicle_json(v));
    j["vehicles"] = vehicles;
    j["sut"] = {{"accel", st.sut_accel}, {"intent", st.sut_intent}};
    auto commands = nlohmann::ordered_json::array();
    for (const auto& c : st.commands) {
      commands.push_back({{"sv", c.sv_id},
                          {"maneuver", std::string(to_string(c.maneuver))},
                          {"owner", c.owner},
                          {"pattern", c.pattern},
                          {"override", c.constraint_override}});
    }
    j["commands"] = commands;
    os << j.dump() << '\n';
  }
  nlohmann::ordered_json end;
  end["type"] = "end";
  end["outcome"] = trace.outcome;
  end["poisoned"] = trace.poisoned;
  if (trace.violation.has_value()) {
    end["violation"] = violation_json(*trace.violation);
  }
  os << end.dump() << '\n';
  return os.str();
}

EpisodeTrace trace_from_jsonl(const std::string& text) {
  EpisodeTrace trace;
  std::istringstream is(text);
  std::string line;
  bool saw_header = false, saw_end = false;
  long last_step = -1;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    nlohmann::ordered_json j;
    try {
      j = nlohmann::ordered_json::parse(line);
    } catch (const nlohmann::json::exception& e) {
      throw TraceError("trace parse error: " + std::string(e.what()));
    }
    const std::string type = j.at("type").get<std::string>();
    if (type == "header") {
      trace.header = j.at("config");
      saw_header = true;
    } else if (type == "step") {
      TraceStep st;
      st.step = j.at("step").get<long>();
      if (st.step <= last_step) {
        throw TraceError("trace steps not strictly increasing");
      }
      last_step = st.step;
      for (const auto& v : j.at("vehicles")) {
        st.vehicles.push_back(vehicle_from_json(v));
      }
      st.sut_accel = j.at("sut").at("accel").get<double>();
      st.sut_intent = j.at("sut").at("intent").get<std::string>();
      for (const auto& c : j.at("commands")) {
        TraceCommand cmd;
        cmd.sv_id = c.at("sv").get<int>();
        cmd.maneuver = maneuver_from_string(c.at("maneuver").get<std::string>());
        cmd.owner = c.at("owner").get<std::string>();
        cmd.pattern = c.at("pattern").get<std::string>();
        cmd.constraint_override = c.at("override").get<bool>();
        st.commands.push_back(std::move(cmd));
      }
      trace.steps.push_back(std::move(st));
    } else if (type == "end") {
      trace.outcome = j.at("outcome").get<std::string>();
      trace.poisoned = j.at("poisoned").get<bool>();
      if (j.contains("violation")) {
        trace.violation = violation_from_json(j.at("violation"));
      }
      saw_end = true;
    } else {
      throw TraceError("unknown trace record type: " + type);
    }
  }
  if (!saw_header || !saw_end) {
    throw TraceError("trace missing header or end record");
  }
  return trace;
}

std::uint64_t EpisodeTrace::hash() const {
  const std::string text = trace_to_jsonl(*this);
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (const unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

void export_trace(const EpisodeTrace& trace, const std::string& path) {
  std::ofstream os(path);
  if (!os) throw TraceError("cannot open trace path for writing: " + path);
  os << trace_to_jsonl(trace);
  if (!os) throw TraceError("write failure on trace: " + path);
}

EpisodeTrace parse_trace(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw TraceError("cannot open trace: " + path);
  std::ostringstream buf;
  buf << is.rdbuf();
  return trace_from_jsonl(buf.str());
}

}  // namespace marlot::harness
