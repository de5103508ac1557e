#pragma once

#include <string>

#include "marlot/harness/trace.hpp"
#include "marlot/sim/road.hpp"

namespace marlot::harness {

struct RenderResult {
  int frames = 0;
  std::string summary_path;
  std::string frames_dir;
};

/// Writes a top-down vector rendering of the episode: one SVG frame per
/// step plus a summary SVG (ego path polyline, speed curve, min-gap curve).
/// The road network is rebuilt from the trace header.
RenderResult render_replay(const EpisodeTrace& trace,
                           const std::string& out_dir);

}  // namespace marlot::harness
