#include "marlot/harness/campaign.hpp"
#include "marlot/harness/replay_render.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"

using namespace marlot;
using harness::CampaignReport;
using harness::Config;
using harness::EpisodeOutcome;
using harness::RepetitionStats;
using harness::ViolationKind;
using harness::ViolationMonitor;
using harness::ViolationParams;
using sim::SimParams;

namespace {

sim::RoadNetwork straight_road(int lanes = 3) {
  return sim::build_road({sim::BlockSpec{sim::BlockKind::Straight, 400.0, 0}},
                         lanes, 1);
}

sim::WorldState boxed_world(const sim::RoadNetwork& net, const SimParams& sp) {
  sim::WorldState world;
  world.dt = sp.dt;
  world.ego = sim::place_vehicle(0, net, 1, 100.0, 0.0, 0.0, sp);
  world.surrounding = {
      sim::place_vehicle(1, net, 1, 100.0 + sp.vehicle_length + 1.0, 0.0, 0.0, sp),
      sim::place_vehicle(2, net, 0, 100.0, 0.0, 0.0, sp),
      sim::place_vehicle(3, net, 1, 100.0 - sp.vehicle_length - 1.0, 0.0, 0.0, sp)};
  world.step = 1;
  return world;
}

harness::SvController scripted(std::vector<std::vector<Maneuver>> seqs) {
  return [seqs](const sim::WorldState& world, const sim::RoadNetwork&, Rng&) {
    std::vector<fuzzer::SvDirective> out(world.surrounding.size());
    for (std::size_t i = 0; i < out.size(); ++i) {
      const auto& seq = seqs[i];
      const std::size_t t = std::min<std::size_t>(world.step, seq.size() - 1);
      out[i].maneuver = seq[t];
    }
    return out;
  };
}

}  // namespace

TEST_CASE("violation oracle: crash with and without the interplay condition") {
  const auto net = straight_road();
  SimParams sp;
  ViolationParams vp;

  SUBCASE("ego collision with two SVs inside D_constraint") {
    auto world = boxed_world(net, sp);
    // ram the ego: rear SV overlapping
    world.surrounding[2] =
        sim::place_vehicle(3, net, 1, 100.0 - sp.vehicle_length + 0.5, 0.0, 2.0, sp);
    ViolationMonitor monitor(vp);
    const auto collisions = sim::detect_collisions(world);
    REQUIRE(!collisions.empty());
    const auto v = monitor.update(world, net, collisions);
    REQUIRE(v.has_value());
    CHECK(v->kind == ViolationKind::MultiVehicleCrash);
    CHECK(v->svs_within_constraint >= 2);
  }

  SUBCASE("ego collision with a single remote SV is not a violation") {
    sim::WorldState world;
    world.dt = sp.dt;
    world.step = 1;
    world.ego = sim::place_vehicle(0, net, 1, 100.0, 0.0, 5.0, sp);
    world.surrounding = {
        sim::place_vehicle(1, net, 1, 100.0 + sp.vehicle_length - 1.0, 0.0, 0.0, sp),
        sim::place_vehicle(2, net, 0, 250.0, 0.0, 5.0, sp),
        sim::place_vehicle(3, net, 2, 300.0, 0.0, 5.0, sp)};
    ViolationMonitor monitor(vp);
    const auto collisions = sim::detect_collisions(world);
    REQUIRE(!collisions.empty());
    CHECK_FALSE(monitor.update(world, net, collisions).has_value());
  }
}

TEST_CASE("violation oracle: off-road, reverse and stall subkinds") {
  const auto net = straight_road(2);
  SimParams sp;
  ViolationParams vp;

  SUBCASE("off-road with boxing SVs") {
    sim::WorldState world;
    world.dt = sp.dt;
    world.step = 1;
    world.ego = sim::place_vehicle(0, net, 0, 100.0, 3.6, 5.0, sp);
    world.surrounding = {
        sim::place_vehicle(1, net, 0, 100.0 + sp.vehicle_length + 1.0, 3.2, 4.0, sp),
        sim::place_vehicle(2, net, 0, 100.0 - sp.vehicle_length - 1.0, 3.2, 4.0, sp),
        sim::place_vehicle(3, net, 1, 250.0, 0.0, 5.0, sp)};
    ViolationMonitor monitor(vp);
    const auto v = monitor.update(world, net, {});
    REQUIRE(v.has_value());
    CHECK(v->kind == ViolationKind::AbnormalOffRoad);
  }

  SUBCASE("reverse must persist for the configured number of steps") {
    auto world = boxed_world(net, sp);
    world.ego.speed = -0.5;
    ViolationMonitor monitor(vp);
    for (int i = 0; i < vp.reverse_steps - 1; ++i) {
      CHECK_FALSE(monitor.update(world, net, {}).has_value());
    }
    const auto v = monitor.update(world, net, {});
    REQUIRE(v.has_value());
    CHECK(v->kind == ViolationKind::AbnormalReverse);
  }

  SUBCASE("a single fast step resets the reverse counter") {
    auto world = boxed_world(net, sp);
    ViolationMonitor monitor(vp);
    world.ego.speed = -0.5;
    for (int i = 0; i < vp.reverse_steps - 1; ++i) {
      CHECK_FALSE(monitor.update(world, net, {}).has_value());
    }
    world.ego.speed = 2.0;
    CHECK_FALSE(monitor.update(world, net, {}).has_value());
    world.ego.speed = -0.5;
    for (int i = 0; i < vp.reverse_steps - 1; ++i) {
      CHECK_FALSE(monitor.update(world, net, {}).has_value());
    }
  }

  SUBCASE("stall fires after 100 persistent slow steps") {
    auto world = boxed_world(net, sp);
    world.ego.speed = 0.0;
    ViolationMonitor monitor(vp);
    std::optional<harness::ViolationRecord> v;
    int steps = 0;
    while (!v.has_value() && steps < 200) {
      v = monitor.update(world, net, {});
      ++steps;
    }
    REQUIRE(v.has_value());
    CHECK(v->kind == ViolationKind::AbnormalStall);
    CHECK(steps == vp.stall_steps);
  }
}

TEST_CASE("violation monotonicity: loosening the proximity gate only adds") {
  const auto net = straight_road();
  SimParams sp;
  // a crash world with only one nearby SV: strict oracle says nothing,
  // loosened oracle (huge D_constraint) reports the crash
  sim::WorldState world;
  world.dt = sp.dt;
  world.step = 1;
  world.ego = sim::place_vehicle(0, net, 1, 100.0, 0.0, 5.0, sp);
  world.surrounding = {
      sim::place_vehicle(1, net, 1, 100.0 + sp.vehicle_length - 1.0, 0.0, 0.0, sp),
      sim::place_vehicle(2, net, 0, 250.0, 0.0, 5.0, sp),
      sim::place_vehicle(3, net, 2, 300.0, 0.0, 5.0, sp)};
  const auto collisions = sim::detect_collisions(world);

  ViolationParams strict;
  ViolationMonitor strict_monitor(strict);
  CHECK_FALSE(strict_monitor.update(world, net, collisions).has_value());

  ViolationParams loose;
  loose.d_constraint = 1e6;
  ViolationMonitor loose_monitor(loose);
  CHECK(loose_monitor.update(world, net, collisions).has_value());
}

TEST_CASE("run_episode: empty road reaches the destination") {
  Config cfg;
  cfg.n_svs = 0;
  const auto net = straight_road();
  Rng rng(3);
  const auto result = harness::run_episode(cfg, net, harness::make_sut_policy(cfg),
                                           scripted({}), rng);
  CHECK(result.outcome == EpisodeOutcome::Destination);
  CHECK_FALSE(result.violation.has_value());
  CHECK(result.trace.outcome == "destination");
}

TEST_CASE("run_episode: identical seeds give identical trace hashes") {
  Config cfg;
  cfg.method = "random";
  const auto net = straight_road();
  const auto controller = [](const sim::WorldState& world,
                             const sim::RoadNetwork&, Rng& r) {
    std::vector<fuzzer::SvDirective> out(world.surrounding.size());
    for (auto& d : out) d.maneuver = baselines::random_maneuver(r);
    return out;
  };
  Rng r1(44), r2(44);
  const auto a = harness::run_episode(cfg, net, harness::make_sut_policy(cfg),
                                      controller, r1);
  const auto b = harness::run_episode(cfg, net, harness::make_sut_policy(cfg),
                                      controller, r2);
  CHECK(a.trace.hash() == b.trace.hash());
  CHECK(a.steps == b.steps);
}

TEST_CASE("run_episode: controller exceptions poison the trace") {
  Config cfg;
  const auto net = straight_road();
  const harness::SvController bad =
      [](const sim::WorldState&, const sim::RoadNetwork&,
         Rng&) -> std::vector<fuzzer::SvDirective> {
    throw std::runtime_error("controller exploded");
  };
  Rng rng(5);
  const auto result =
      harness::run_episode(cfg, net, harness::make_sut_policy(cfg), bad, rng);
  CHECK(result.outcome == EpisodeOutcome::ControllerError);
  CHECK(result.trace.poisoned);
}

TEST_CASE("run_episode: a scripted box-in forces a multi-vehicle crash") {
  Config cfg;
  cfg.spawn_span = 10.0;
  const auto net = straight_road();
  // SV1 brakes dead ahead, SV2 parks alongside, SV3 rams from behind.
  // Spawn randomness is bypassed by a fixed seed chosen so the geometry
  // starts compact (asserted below).
  Rng rng(71);
  const harness::SvController controller =
      [](const sim::WorldState& world, const sim::RoadNetwork& n, Rng&) {
        std::vector<fuzzer::SvDirective> out(world.surrounding.size());
        const auto& ego = world.ego;
        for (std::size_t i = 0; i < out.size(); ++i) {
          const auto& sv = world.surrounding[i];
          const auto rel = fuzzer::relative_pose(sv, ego, n);
          if (rel.same_lane && rel.ds > 0.0) {
            out[i].maneuver = Maneuver::Brake;        // block the front
          } else if (rel.same_lane && rel.ds <= 0.0) {
            out[i].maneuver = Maneuver::Accelerate;   // ram from behind
          } else {
            // hold position beside the ego
            out[i].maneuver = sv.speed > ego.speed ? Maneuver::Decelerate
                                                   : Maneuver::Accelerate;
          }
        }
        return out;
      };
  bool crashed = false;
  for (int attempt = 0; attempt < 20 && !crashed; ++attempt) {
    const auto result = harness::run_episode(
        cfg, net, harness::make_sut_policy(cfg), controller, rng);
    if (result.outcome == EpisodeOutcome::Violation) {
      REQUIRE(result.violation.has_value());
      CHECK(result.violation->kind == ViolationKind::MultiVehicleCrash);
      CHECK(result.violation->svs_within_constraint >= 2);
      CHECK(result.trace.violation.has_value());
      crashed = true;
    }
  }
  CHECK(crashed);
}

TEST_CASE("trace export/parse round-trip preserves everything") {
  Config cfg;
  cfg.method = "random";
  const auto net = straight_road();
  const auto controller = [](const sim::WorldState& world,
                             const sim::RoadNetwork&, Rng& r) {
    std::vector<fuzzer::SvDirective> out(world.surrounding.size());
    for (auto& d : out) d.maneuver = baselines::random_maneuver(r);
    return out;
  };
  Rng rng(6);
  const auto result = harness::run_episode(
      cfg, net, harness::make_sut_policy(cfg), controller, rng);
  const std::string path = "test_trace_roundtrip.jsonl";
  export_trace(result.trace, path);
  const auto parsed = harness::parse_trace(path);
  CHECK(trace_to_jsonl(parsed) == trace_to_jsonl(result.trace));
  CHECK(parsed.hash() == result.trace.hash());
  REQUIRE(parsed.steps.size() == result.trace.steps.size());
  std::filesystem::remove(path);
}

TEST_CASE("campaign metrics: rate and top-5 from hand-built sequences") {
  CampaignReport report;
  report.budget = 200;
  report.repetitions = 2;
  report.k = 5;

  SUBCASE("20 violations in 200 runs is a 10 percent rate") {
    RepetitionStats rep;
    for (int i = 1; i <= 20; ++i) rep.violation_runs.push_back(i * 10);
    report.reps = {rep, rep};
    harness::compute_campaign_metrics(report);
    CHECK(report.violation_rate == doctest::Approx(10.0));
    REQUIRE(report.top_k.has_value());
    CHECK(*report.top_k == doctest::Approx(50.0));
  }
  SUBCASE("top-5 is the run number of the fifth violation") {
    RepetitionStats rep;
    rep.violation_runs = {3, 10, 11, 50, 80, 90};
    report.reps = {rep, rep};
    harness::compute_campaign_metrics(report);
    REQUIRE(report.top_k.has_value());
    CHECK(*report.top_k == doctest::Approx(80.0));
  }
  SUBCASE("four violations cannot produce a top-5") {
    RepetitionStats rep;
    rep.violation_runs = {3, 10, 11, 50};
    report.reps = {rep, rep};
    harness::compute_campaign_metrics(report);
    CHECK_FALSE(report.top_k.has_value());
    CHECK(report.violation_rate == doctest::Approx(2.0));
  }
  SUBCASE("top-5 averaged only over repetitions that found it") {
    RepetitionStats found;
    found.violation_runs = {1, 2, 3, 4, 5};
    RepetitionStats missing;
    missing.violation_runs = {9};
    report.reps = {found, missing};
    harness::compute_campaign_metrics(report);
    REQUIRE(report.top_k.has_value());  // half the reps found it
    CHECK(*report.top_k == doctest::Approx(5.0));
    report.reps = {missing, missing};
    harness::compute_campaign_metrics(report);
    CHECK_FALSE(report.top_k.has_value());
  }
}

TEST_CASE("campaign: random method, determinism and report round-trip") {
  Config cfg;
  cfg.method = "random";
  cfg.scenario = "straight";
  cfg.lanes = 2;
  cfg.budget = 4;
  cfg.repetitions = 2;
  cfg.seed = 909;
  const auto a = harness::run_campaign(cfg, std::nullopt);
  const auto b = harness::run_campaign(cfg, std::nullopt);
  CHECK(a.to_json() == b.to_json());
  REQUIRE(a.reps.size() == 2);
  for (std::size_t i = 0; i < a.reps.size(); ++i) {
    CHECK(a.reps[i].trace_hash == b.reps[i].trace_hash);
  }
  const auto round = CampaignReport::from_json(a.to_json());
  CHECK(round.to_json() == a.to_json());
}

TEST_CASE("campaign: ga accounting stays within budget") {
  Config cfg;
  cfg.method = "ga";
  cfg.scenario = "straight";
  cfg.budget = 13;
  cfg.repetitions = 1;
  cfg.seed = 11;
  const auto report = harness::run_campaign(cfg, std::nullopt);
  REQUIRE(report.reps.size() == 1);
  int runs = 0;
  for (const int r : report.reps[0].violation_runs) {
    CHECK(r >= 1);
    CHECK(r <= 13);
    ++runs;
  }
  CHECK(report.budget == 13);
}

TEST_CASE("campaign requires a checkpoint for policy methods") {
  Config cfg;
  cfg.method = "marl_ot";
  CHECK_THROWS_AS(harness::run_campaign(cfg, std::nullopt),
                  harness::ConfigError);
}

TEST_CASE("csv aggregation includes None for absent top-5") {
  CampaignReport a;
  a.method = "random";
  a.scenario = "straight";
  a.sut = "idm";
  a.lanes = 2;
  a.budget = 100;
  a.repetitions = 1;
  a.violation_rate = 1.0;
  CampaignReport b = a;
  b.method = "marl_ot";
  b.violation_rate = 11.5;
  b.top_k = 42.0;
  const auto csv = harness::reports_to_csv({a, b});
  CHECK(csv.find("road_type") != std::string::npos);
  CHECK(csv.find("straight") != std::string::npos);
  CHECK(csv.find("None") != std::string::npos);
  CHECK(csv.find("42") != std::string::npos);
}

TEST_CASE("replay rendering: frame count equals step count, path matches") {
  Config cfg;
  cfg.method = "random";
  cfg.scenario = "straight";
  cfg.lanes = 2;
  cfg.budget = 1;
  cfg.repetitions = 1;
  cfg.seed = 21;
  const std::string trace_dir = "test_render_traces";
  const auto report = harness::run_campaign(cfg, std::nullopt, trace_dir);
  (void)report;
  // find the exported trace
  std::string trace_path;
  for (const auto& entry : std::filesystem::directory_iterator(trace_dir)) {
    trace_path = entry.path().string();
  }
  REQUIRE(!trace_path.empty());
  const auto trace = harness::parse_trace(trace_path);

  const std::string out_dir = "test_render_out";
  const auto render = harness::render_replay(trace, out_dir);
  CHECK(render.frames == static_cast<int>(trace.steps.size()));

  // parse the ego path polyline out of the summary svg
  std::ifstream is(render.summary_path);
  std::stringstream buf;
  buf << is.rdbuf();
  const std::string svg = buf.str();
  const auto tag = svg.find("id=\"ego_path\"");
  REQUIRE(tag != std::string::npos);
  const auto points_begin = svg.find("points=\"", tag);
  REQUIRE(points_begin != std::string::npos);
  const auto points_end = svg.find('"', points_begin + 8);
  std::istringstream pts(svg.substr(points_begin + 8,
                                    points_end - points_begin - 8));
  std::string pair;
  std::size_t idx = 0;
  while (pts >> pair) {
    const auto comma = pair.find(',');
    REQUIRE(comma != std::string::npos);
    const double x = std::stod(pair.substr(0, comma));
    const double y = std::stod(pair.substr(comma + 1));
    REQUIRE(idx < trace.steps.size());
    CHECK(std::abs(x - trace.steps[idx].vehicles[0].x) < 1e-6);
    CHECK(std::abs(y - trace.steps[idx].vehicles[0].y) < 1e-6);
    ++idx;
  }
  CHECK(idx == trace.steps.size());

  std::filesystem::remove_all(trace_dir);
  std::filesystem::remove_all(out_dir);
}

TEST_CASE("config json round-trip preserves the tree") {
  Config cfg;
  cfg.scenario = "merge";
  cfg.lanes = 4;
  cfg.sut = "heuristic";
  cfg.method = "ga";
  cfg.budget = 77;
  cfg.reward.mu1 = 0.9;
  cfg.fuzzer.d_constraint = 2.5;
  cfg.train.gamma = 0.9;
  const auto j = config_to_json(cfg);
  const auto back = harness::config_from_json(j);
  CHECK(back.scenario == "merge");
  CHECK(back.lanes == 4);
  CHECK(back.sut == "heuristic");
  CHECK(back.method == "ga");
  CHECK(back.budget == 77);
  CHECK(back.reward.mu1 == 0.9);
  CHECK(back.fuzzer.d_constraint == 2.5);
  CHECK(back.train.gamma == 0.9);
  CHECK(config_to_json(back) == j);
}

TEST_CASE("config validation rejects bad values") {
  nlohmann::json j;
  j["lanes"] = 7;
  CHECK_THROWS_AS(harness::config_from_json(j), harness::ConfigError);
  nlohmann::json k;
  k["method"] = "quantum";
  CHECK_THROWS_AS(harness::config_from_json(k), harness::ConfigError);
  nlohmann::json s;
  s["sut"] = "psychic";
  CHECK_THROWS_AS(harness::config_from_json(s), harness::ConfigError);
}

TEST_CASE("scenario roster covers the published road types") {
  for (const auto& name : harness::scenario_names()) {
    const auto blocks = harness::scenario_blocks(name, 33);
    CHECK(!blocks.empty());
    CHECK(blocks.size() <= 3);
    for (int lanes = 2; lanes <= 4; ++lanes) {
      const auto net = sim::build_road(blocks, lanes, 1);
      CHECK(net.lane_count == lanes);
    }
  }
  CHECK_THROWS_AS(harness::scenario_blocks("moon_base", 1),
                  harness::ConfigError);
}
