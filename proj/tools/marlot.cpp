#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "marlot/baselines/controllers.hpp"
#include "marlot/harness/campaign.hpp"
#include "marlot/harness/config.hpp"
#include "marlot/harness/replay_render.hpp"

namespace {

using marlot::harness::Config;

Config load_base_config(const std::string& config_path) {
  if (config_path.empty()) return Config{};
  return marlot::harness::load_config_file(config_path);
}

int cmd_train(const std::string& config_path, std::uint64_t seed,
              const std::string& method, const std::string& out,
              std::optional<int> episodes) {
  Config cfg = load_base_config(config_path);
  cfg.seed = seed;
  cfg.train.seed = seed;
  if (episodes.has_value()) cfg.train.episodes = *episodes;

  marlot::marl::TrainEnv env;
  env.arena = cfg.arena;
  env.weights = cfg.reward;

  marlot::marl::Checkpoint ckpt;
  if (method == "single_rl") {
    ckpt = marlot::baselines::single_rl_train(env, cfg.train);
  } else {
    cfg.train.algo = marlot::marl::Algo::Maddpg;
    ckpt = marlot::marl::train(env, cfg.train);
  }
  save_checkpoint(ckpt, out);

  const auto stats = marlot::marl::evaluate(ckpt, env, 100, seed + 1);
  std::cout << "trained " << ckpt.algo << " for " << ckpt.episodes
            << " episodes (final noise " << ckpt.final_noise << ")\n"
            << "eval: enclosure success " << 100.0 * stats.enclosure_success_rate
            << "%, mean distance " << stats.mean_initial_distance << " -> "
            << stats.mean_final_distance << "\n"
            << "checkpoint written to " << out << "\n";
  return 0;
}

int cmd_run(Config cfg, const std::string& out, const std::string& trace_dir) {
  std::optional<marlot::marl::Checkpoint> ckpt;
  if (cfg.method == "marl_ot" || cfg.method == "single_rl") {
    if (cfg.checkpoint_path.empty()) {
      std::cerr << "method " << cfg.method << " requires --checkpoint\n";
      return 2;
    }
    ckpt = marlot::marl::load_checkpoint(cfg.checkpoint_path);
  }
  const auto report = marlot::harness::run_campaign(cfg, ckpt, trace_dir);
  const auto j = report.to_json();
  if (out.empty()) {
    std::cout << j.dump(2) << "\n";
  } else {
    std::ofstream os(out);
    os << j.dump(2) << "\n";
    std::cout << "campaign report written to " << out << "\n";
  }
  std::cout << "violation rate: " << report.violation_rate << "%";
  if (report.top_k.has_value()) {
    std::cout << ", top-" << report.k << ": " << *report.top_k;
  } else {
    std::cout << ", top-" << report.k << ": None";
  }
  std::cout << "\n";
  return 0;
}

int cmd_replay(const std::string& trace_path, const std::string& out_dir) {
  const auto trace = marlot::harness::parse_trace(trace_path);
  const auto result = marlot::harness::render_replay(trace, out_dir);
  std::cout << "rendered " << result.frames << " frames into "
            << result.frames_dir << "\n"
            << "summary: " << result.summary_path << "\n";
  return 0;
}

int cmd_report(const std::vector<std::string>& inputs,
               const std::string& out) {
  std::vector<marlot::harness::CampaignReport> reports;
  for (const auto& path : inputs) {
    std::ifstream is(path);
    if (!is) {
      std::cerr << "cannot open report: " << path << "\n";
      return 2;
    }
    nlohmann::json j;
    is >> j;
    reports.push_back(marlot::harness::CampaignReport::from_json(j));
  }
  const std::string csv = marlot::harness::reports_to_csv(reports);
  if (out.empty()) {
    std::cout << csv;
  } else {
    std::ofstream os(out);
    os << csv;
    std::cout << "table written to " << out << "\n";
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"MARL-guided online fuzzing campaigns for lane-based ADS testing"};
  app.require_subcommand(1);

  // ---- train
  auto* train = app.add_subcommand("train", "train the MARL (or single-RL) policy");
  std::string train_config, train_method = "marl_ot", train_out = "checkpoint.bin";
  std::uint64_t train_seed = 0;
  int train_episodes = -1;
  train->add_option("--config", train_config, "config file (JSON)");
  train->add_option("--seed", train_seed, "master seed")->required();
  train->add_option("--method", train_method, "marl_ot | single_rl")
      ->check(CLI::IsMember({"marl_ot", "single_rl"}));
  train->add_option("--out", train_out, "checkpoint output path");
  train->add_option("--episodes", train_episodes, "override training episodes");

  // ---- run
  auto* run = app.add_subcommand("run", "run a testing campaign");
  std::string run_config, run_out, run_trace_dir, run_checkpoint;
  std::string run_scenario, run_sut, run_method;
  std::uint64_t run_seed = 0;
  int run_lanes = 0, run_budget = 0, run_reps = 0;
  run->add_option("--config", run_config, "config file (JSON)");
  run->add_option("--seed", run_seed, "master seed")->required();
  run->add_option("--scenario", run_scenario,
                  "straight|roundabout|merge|t_intersection|circular|intersection|mix");
  run->add_option("--lanes", run_lanes, "lane count (2-4)");
  run->add_option("--sut", run_sut, "idm | heuristic");
  run->add_option("--method", run_method, "marl_ot | random | ga | single_rl");
  run->add_option("--budget", run_budget, "episodes per repetition");
  run->add_option("--reps", run_reps, "repetitions");
  run->add_option("--checkpoint", run_checkpoint, "trained policy checkpoint");
  run->add_option("--out", run_out, "report output path (JSON)");
  run->add_option("--trace-dir", run_trace_dir, "export episode traces here");

  // ---- replay
  auto* replay = app.add_subcommand("replay", "render an episode trace");
  std::string replay_trace, replay_out = "replay_out";
  replay->add_option("--trace", replay_trace, "episode trace (JSONL)")->required();
  replay->add_option("--out", replay_out, "output directory");

  // ---- report
  auto* report = app.add_subcommand("report", "aggregate campaign reports to CSV");
  std::vector<std::string> report_inputs;
  std::string report_out;
  report->add_option("--inputs", report_inputs, "campaign report JSON files")
      ->required();
  report->add_option("--out", report_out, "CSV output path");

  CLI11_PARSE(app, argc, argv);

  try {
    if (train->parsed()) {
      return cmd_train(train_config, train_seed, train_method, train_out,
                       train_episodes >= 0 ? std::optional<int>(train_episodes)
                                           : std::nullopt);
    }
    if (run->parsed()) {
      Config cfg = load_base_config(run_config);
      cfg.seed = run_seed;
      if (run->count("--scenario")) cfg.scenario = run_scenario;
      if (run->count("--lanes")) cfg.lanes = run_lanes;
      if (run->count("--sut")) cfg.sut = run_sut;
      if (run->count("--method")) cfg.method = run_method;
      if (run->count("--budget")) cfg.budget = run_budget;
      if (run->count("--reps")) cfg.repetitions = run_reps;
      if (run->count("--checkpoint")) cfg.checkpoint_path = run_checkpoint;
      // re-validate after overrides
      cfg = marlot::harness::config_from_json(config_to_json(cfg));
      return cmd_run(cfg, run_out, run_trace_dir);
    }
    if (replay->parsed()) {
      return cmd_replay(replay_trace, replay_out);
    }
    if (report->parsed()) {
      return cmd_report(report_inputs, report_out);
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
