#include "marlot/harness/replay_render.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <limits>
#include <sstream>

#include "marlot/harness/config.hpp"
#include "marlot/rng.hpp"

namespace marlot::harness {

namespace {

struct Bounds {
  double min_x = std::numeric_limits<double>::max();
  double min_y = std::numeric_limits<double>::max();
  double max_x = std::numeric_limits<double>::lowest();
  double max_y = std::numeric_limits<double>::lowest();

  void include(double x, double y) {
    min_x = std::min(min_x, x);
    min_y = std::min(min_y, y);
    max_x = std::max(max_x, x);
    max_y = std::max(max_y, y);
  }
};

std::string fmt(double v) {
  std::ostringstream os;
  os << std::setprecision(10) << v;
  return os.str();
}

void svg_open(std::ostream& os, const Bounds& b, double margin) {
  const double w = b.max_x - b.min_x + 2 * margin;
  const double h = b.max_y - b.min_y + 2 * margin;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\""
     << fmt(b.min_x - margin) << " " << fmt(-(b.max_y + margin)) << " "
     << fmt(w) << " " << fmt(h) << "\">\n";
  // world y points up; flip into svg coordinates once here
  os << "<g transform=\"scale(1,-1)\">\n";
}

void svg_close(std::ostream& os) { os << "</g>\n</svg>\n"; }

void draw_road(std::ostream& os, const sim::RoadNetwork& net) {
  const auto draw_lane = [&os](const sim::Lane& lane, const char* color) {
    for (const double side : {-0.5, 0.5}) {
      os << "<polyline fill=\"none\" stroke=\"" << color
         << "\" stroke-width=\"0.15\" points=\"";
      const auto& pts = lane.center.points();
      const auto& cum = lane.center.cumulative();
      for (std::size_t i = 0; i < pts.size(); ++i) {
        const auto p = lane.center.offset_point(cum[i], side * lane.width);
        os << fmt(p.x) << "," << fmt(p.y) << " ";
      }
      os << "\"/>\n";
    }
  };
  for (const auto& lane : net.lanes) draw_lane(lane, "#999999");
  for (const auto& lane : net.aux_lanes) draw_lane(lane, "#cccccc");
}

void draw_vehicle(std::ostream& os, const TraceVehicle& v, const char* color) {
  geom::Obb box{geom::Vec2{v.x, v.y}, v.heading, 4.8, 1.9};
  os << "<polygon fill=\"" << color << "\" points=\"";
  for (const auto& c : box.corners()) {
    os << fmt(c.x) << "," << fmt(c.y) << " ";
  }
  os << "\"/>\n";
}

}  // namespace

RenderResult render_replay(const EpisodeTrace& trace,
                           const std::string& out_dir) {
  namespace fs = std::filesystem;
  RenderResult result;
  fs::create_directories(out_dir);
  const fs::path frames_dir = fs::path(out_dir) / "frames";
  fs::create_directories(frames_dir);
  result.frames_dir = frames_dir.string();

  const std::string scenario = trace.header.value("scenario", "straight");
  const int lanes = trace.header.value("lanes", 2);
  const std::uint64_t seed = trace.header.value("campaign_seed", 1ULL);
  const auto net = build_road(scenario_blocks(scenario, seed), lanes,
                              Rng::derive(seed, 7).next_u64());

  Bounds bounds;
  for (const auto& st : trace.steps) {
    for (const auto& v : st.vehicles) bounds.include(v.x, v.y);
  }
  if (trace.steps.empty()) bounds.include(0.0, 0.0);

  for (std::size_t i = 0; i < trace.steps.size(); ++i) {
    std::ostringstream name;
    name << "frame_" << std::setw(5) << std::setfill('0') << i << ".svg";
    std::ofstream os(frames_dir / name.str());
    if (!os) throw TraceError("cannot write frame in " + result.frames_dir);
    svg_open(os, bounds, 20.0);
    draw_road(os, net);
    const auto& st = trace.steps[i];
    for (std::size_t k = 0; k < st.vehicles.size(); ++k) {
      draw_vehicle(os, st.vehicles[k], k == 0 ? "#2c9e3f" : "#c24f2a");
    }
    svg_close(os);
    result.frames += 1;
  }

  // Summary: ego path in raw world coordinates plus speed / min-gap curves.
  const fs::path summary = fs::path(out_dir) / "summary.svg";
  std::ofstream os(summary);
  if (!os) throw TraceError("cannot write " + summary.string());
  svg_open(os, bounds, 20.0);
  draw_road(os, net);
  os << "<polyline id=\"ego_path\" fill=\"none\" stroke=\"#2c9e3f\" "
        "stroke-width=\"0.4\" points=\"";
  for (const auto& st : trace.steps) {
    os << fmt(st.vehicles.at(0).x) << "," << fmt(st.vehicles.at(0).y) << " ";
  }
  os << "\"/>\n";
  svg_close(os);

  // speed and min-gap curves appended as a second svg block in the same file
  // would not be valid svg; draw them under the map inside the same viewBox
  std::ofstream curves(fs::path(out_dir) / "curves.svg");
  if (!curves) throw TraceError("cannot write curves.svg");
  const int n = static_cast<int>(trace.steps.size());
  curves << "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 "
         << std::max(1, n) << " 60\">\n";
  curves << "<polyline id=\"ego_speed\" fill=\"none\" stroke=\"#2c6e9e\" "
            "stroke-width=\"0.3\" points=\"";
  for (int i = 0; i < n; ++i) {
    curves << i << "," << fmt(30.0 - trace.steps[i].vehicles.at(0).speed)
           << " ";
  }
  curves << "\"/>\n";
  curves << "<polyline id=\"min_gap\" fill=\"none\" stroke=\"#9e2c2c\" "
            "stroke-width=\"0.3\" points=\"";
  for (int i = 0; i < n; ++i) {
    double min_gap = 60.0;
    const auto& st = trace.steps[i];
    for (std::size_t k = 1; k < st.vehicles.size(); ++k) {
      const double dx = st.vehicles[k].x - st.vehicles[0].x;
      const double dy = st.vehicles[k].y - st.vehicles[0].y;
      min_gap = std::min(min_gap, std::sqrt(dx * dx + dy * dy));
    }
    curves << i << "," << fmt(60.0 - min_gap) << " ";
  }
  curves << "\"/>\n</svg>\n";

  result.summary_path = summary.string();
  return result;
}

}  // namespace marlot::harness
