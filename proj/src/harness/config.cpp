#include "marlot/harness/config.hpp"

#include <fstream>

#include "marlot/rng.hpp"

namespace marlot::harness {

namespace {

template <typename T>
void get_if(const nlohmann::json& j, const char* key, T& out) {
  if (j.contains(key)) out = j.at(key).get<T>();
}

void parse_sim(const nlohmann::json& j, sim::SimParams& p) {
  get_if(j, "dt", p.dt);
  get_if(j, "v_max", p.v_max);
  get_if(j, "a_acc", p.a_acc);
  get_if(j, "a_dec", p.a_dec);
  get_if(j, "a_brk", p.a_brk);
  get_if(j, "v_min", p.v_min);
  get_if(j, "lane_change_duration", p.lane_change_duration);
  get_if(j, "vehicle_length", p.vehicle_length);
  get_if(j, "vehicle_width", p.vehicle_width);
  get_if(j, "reverse_accel", p.reverse_accel);
  get_if(j, "reverse_v_max", p.reverse_v_max);
}

void parse_sut(const nlohmann::json& j, sut::SutConfig& c) {
  if (j.contains("idm")) {
    const auto& i = j.at("idm");
    get_if(i, "v0", c.idm.v0);
    get_if(i, "T", c.idm.T);
    get_if(i, "a", c.idm.a);
    get_if(i, "b", c.idm.b);
    get_if(i, "delta", c.idm.delta);
    get_if(i, "s0", c.idm.s0);
  }
  get_if(j, "d_safe", c.d_safe);
  get_if(j, "stopped_speed", c.stopped_speed);
  get_if(j, "sidestep_range", c.sidestep_range);
  get_if(j, "escape_gap", c.escape_gap);
  get_if(j, "reverse_margin", c.reverse_margin);
  get_if(j, "h_target_speed", c.h_target_speed);
  get_if(j, "h_gain", c.h_gain);
  get_if(j, "h_brake_gap", c.h_brake_gap);
  get_if(j, "h_headway", c.h_headway);
  get_if(j, "h_sidestep_gap", c.h_sidestep_gap);
  get_if(j, "h_sidestep_margin", c.h_sidestep_margin);
  get_if(j, "a_brk", c.a_brk);
}

void parse_fuzzer(const nlohmann::json& j, fuzzer::FuzzerConfig& c) {
  get_if(j, "d_safe", c.d_safe);
  get_if(j, "d_constraint", c.d_constraint);
  get_if(j, "side_behind_range", c.side_behind_range);
  get_if(j, "pattern_horizon", c.pattern_horizon);
  get_if(j, "k_brk", c.k_brk);
  get_if(j, "k_dec", c.k_dec);
  get_if(j, "lane_change_steps", c.lane_change_steps);
  get_if(j, "retrigger_prob", c.retrigger_prob);
  get_if(j, "bridge_v_cap", c.bridge_v_cap);
  get_if(j, "patterns_enabled", c.patterns_enabled);
}

void parse_reward(const nlohmann::json& j, arena::RewardWeights& w) {
  get_if(j, "mu1", w.mu1);
  get_if(j, "mu2", w.mu2);
  get_if(j, "mu3", w.mu3);
  get_if(j, "completion", w.completion);
  get_if(j, "d_enclosure", w.d_enclosure);
  get_if(j, "cos_eps", w.cos_eps);
  get_if(j, "area_rel_tol", w.area_rel_tol);
  get_if(j, "literal_eq6_sign", w.literal_eq6_sign);
}

void parse_arena(const nlohmann::json& j, arena::ArenaConfig& a) {
  get_if(j, "n", a.n);
  get_if(j, "half_extent", a.half_extent);
  get_if(j, "evader_spawn_extent", a.evader_spawn_extent);
  get_if(j, "v_cap", a.v_cap);
  get_if(j, "evader_ratio", a.evader_ratio);
  get_if(j, "episode_cap", a.episode_cap);
  get_if(j, "learned_evader", a.learned_evader);
}

void parse_train(const nlohmann::json& j, marl::TrainConfig& t) {
  get_if(j, "hidden", t.hidden);
  get_if(j, "lr", t.lr);
  get_if(j, "gamma", t.gamma);
  get_if(j, "tau", t.tau);
  get_if(j, "batch", t.batch);
  get_if(j, "buffer_capacity", t.buffer_capacity);
  get_if(j, "update_every", t.update_every);
  get_if(j, "warmup_steps", t.warmup_steps);
  get_if(j, "episodes", t.episodes);
  get_if(j, "noise_init", t.noise_init);
  get_if(j, "noise_decay", t.noise_decay);
  get_if(j, "noise_floor", t.noise_floor);
  get_if(j, "divergence_q", t.divergence_q);
}

void parse_ga(const nlohmann::json& j, baselines::GaConfig& g) {
  get_if(j, "population", g.population);
  get_if(j, "crossover_rate", g.crossover_rate);
  get_if(j, "mutation_rate", g.mutation_rate);
}

}  // namespace

Config config_from_json(const nlohmann::json& j) {
  Config cfg;
  get_if(j, "scenario", cfg.scenario);
  get_if(j, "lanes", cfg.lanes);
  get_if(j, "sut", cfg.sut);
  get_if(j, "method", cfg.method);
  get_if(j, "budget", cfg.budget);
  get_if(j, "repetitions", cfg.repetitions);
  get_if(j, "seed", cfg.seed);
  get_if(j, "checkpoint", cfg.checkpoint_path);
  get_if(j, "n_svs", cfg.n_svs);
  get_if(j, "spawn_span", cfg.spawn_span);
  get_if(j, "ego_initial_speed", cfg.ego_initial_speed);
  get_if(j, "sv_speed_min", cfg.sv_speed_min);
  get_if(j, "sv_speed_max", cfg.sv_speed_max);
  get_if(j, "step_cap_min", cfg.step_cap_min);
  get_if(j, "stall_steps", cfg.stall_steps);
  get_if(j, "reverse_steps", cfg.reverse_steps);
  get_if(j, "reverse_speed_threshold", cfg.reverse_speed_threshold);
  get_if(j, "stall_speed_threshold", cfg.stall_speed_threshold);
  if (j.contains("sim")) parse_sim(j.at("sim"), cfg.sim);
  if (j.contains("sut_cfg")) parse_sut(j.at("sut_cfg"), cfg.sut_cfg);
  if (j.contains("fuzzer")) parse_fuzzer(j.at("fuzzer"), cfg.fuzzer);
  if (j.contains("reward")) parse_reward(j.at("reward"), cfg.reward);
  if (j.contains("arena")) parse_arena(j.at("arena"), cfg.arena);
  if (j.contains("train")) parse_train(j.at("train"), cfg.train);
  if (j.contains("ga")) parse_ga(j.at("ga"), cfg.ga);

  if (cfg.lanes < 2 || cfg.lanes > 4) {
    throw ConfigError("lanes must be within [2, 4]");
  }
  if (cfg.method != "marl_ot" && cfg.method != "random" && cfg.method != "ga" &&
      cfg.method != "single_rl") {
    throw ConfigError("unknown method: " + cfg.method);
  }
  if (cfg.sut != "idm" && cfg.sut != "heuristic") {
    throw ConfigError("unknown sut: " + cfg.sut);
  }
  cfg.arena.n = cfg.n_svs;
  return cfg;
}

nlohmann::ordered_json config_to_json(const Config& cfg) {
  nlohmann::ordered_json j;
  j["scenario"] = cfg.scenario;
  j["lanes"] = cfg.lanes;
  j["sut"] = cfg.sut;
  j["method"] = cfg.method;
  j["budget"] = cfg.budget;
  j["repetitions"] = cfg.repetitions;
  j["seed"] = cfg.seed;
  j["checkpoint"] = cfg.checkpoint_path;
  j["n_svs"] = cfg.n_svs;
  j["spawn_span"] = cfg.spawn_span;
  j["ego_initial_speed"] = cfg.ego_initial_speed;
  j["sv_speed_min"] = cfg.sv_speed_min;
  j["sv_speed_max"] = cfg.sv_speed_max;
  j["step_cap_min"] = cfg.step_cap_min;
  j["stall_steps"] = cfg.stall_steps;
  j["reverse_steps"] = cfg.reverse_steps;
  j["reverse_speed_threshold"] = cfg.reverse_speed_threshold;
  j["stall_speed_threshold"] = cfg.stall_speed_threshold;
  j["sim"] = {{"dt", cfg.sim.dt},
              {"v_max", cfg.sim.v_max},
              {"a_acc", cfg.sim.a_acc},
              {"a_dec", cfg.sim.a_dec},
              {"a_brk", cfg.sim.a_brk},
              {"v_min", cfg.sim.v_min},
              {"lane_change_duration", cfg.sim.lane_change_duration},
              {"vehicle_length", cfg.sim.vehicle_length},
              {"vehicle_width", cfg.sim.vehicle_width},
              {"reverse_accel", cfg.sim.reverse_accel},
              {"reverse_v_max", cfg.sim.reverse_v_max}};
  j["sut_cfg"] = {{"idm",
                   {{"v0", cfg.sut_cfg.idm.v0},
                    {"T", cfg.sut_cfg.idm.T},
                    {"a", cfg.sut_cfg.idm.a},
                    {"b", cfg.sut_cfg.idm.b},
                    {"delta", cfg.sut_cfg.idm.delta},
                    {"s0", cfg.sut_cfg.idm.s0}}},
                  {"d_safe", cfg.sut_cfg.d_safe},
                  {"stopped_speed", cfg.sut_cfg.stopped_speed},
                  {"sidestep_range", cfg.sut_cfg.sidestep_range},
                  {"escape_gap", cfg.sut_cfg.escape_gap},
                  {"reverse_margin", cfg.sut_cfg.reverse_margin},
                  {"h_target_speed", cfg.sut_cfg.h_target_speed},
                  {"h_gain", cfg.sut_cfg.h_gain},
                  {"h_brake_gap", cfg.sut_cfg.h_brake_gap},
                  {"h_headway", cfg.sut_cfg.h_headway},
                  {"h_sidestep_gap", cfg.sut_cfg.h_sidestep_gap},
                  {"h_sidestep_margin", cfg.sut_cfg.h_sidestep_margin},
                  {"a_brk", cfg.sut_cfg.a_brk}};
  j["fuzzer"] = {{"d_safe", cfg.fuzzer.d_safe},
                 {"d_constraint", cfg.fuzzer.d_constraint},
                 {"side_behind_range", cfg.fuzzer.side_behind_range},
                 {"pattern_horizon", cfg.fuzzer.pattern_horizon},
                 {"k_brk", cfg.fuzzer.k_brk},
                 {"k_dec", cfg.fuzzer.k_dec},
                 {"lane_change_steps", cfg.fuzzer.lane_change_steps},
                 {"retrigger_prob", cfg.fuzzer.retrigger_prob},
                 {"bridge_v_cap", cfg.fuzzer.bridge_v_cap},
                 {"patterns_enabled", cfg.fuzzer.patterns_enabled}};
  j["reward"] = {{"mu1", cfg.reward.mu1},
                 {"mu2", cfg.reward.mu2},
                 {"mu3", cfg.reward.mu3},
                 {"completion", cfg.reward.completion},
                 {"d_enclosure", cfg.reward.d_enclosure},
                 {"cos_eps", cfg.reward.cos_eps},
                 {"area_rel_tol", cfg.reward.area_rel_tol},
                 {"literal_eq6_sign", cfg.reward.literal_eq6_sign}};
  j["arena"] = {{"n", cfg.arena.n},
                {"half_extent", cfg.arena.half_extent},
                {"evader_spawn_extent", cfg.arena.evader_spawn_extent},
                {"v_cap", cfg.arena.v_cap},
                {"evader_ratio", cfg.arena.evader_ratio},
                {"episode_cap", cfg.arena.episode_cap},
                {"learned_evader", cfg.arena.learned_evader}};
  j["train"] = {{"hidden", cfg.train.hidden},
                {"lr", cfg.train.lr},
                {"gamma", cfg.train.gamma},
                {"tau", cfg.train.tau},
                {"batch", cfg.train.batch},
                {"buffer_capacity", cfg.train.buffer_capacity},
                {"update_every", cfg.train.update_every},
                {"warmup_steps", cfg.train.warmup_steps},
                {"episodes", cfg.train.episodes},
                {"noise_init", cfg.train.noise_init},
                {"noise_decay", cfg.train.noise_decay},
                {"noise_floor", cfg.train.noise_floor},
                {"divergence_q", cfg.train.divergence_q}};
  j["ga"] = {{"population", cfg.ga.population},
             {"crossover_rate", cfg.ga.crossover_rate},
             {"mutation_rate", cfg.ga.mutation_rate}};
  return j;
}

Config load_config_file(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw ConfigError("cannot open config file: " + path);
  nlohmann::json j;
  try {
    is >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("config parse error: " + std::string(e.what()));
  }
  return config_from_json(j);
}

const std::vector<std::string>& scenario_names() {
  static const std::vector<std::string> names = {
      "straight", "roundabout", "merge",    "t_intersection",
      "circular", "intersection", "mix"};
  return names;
}

std::vector<sim::BlockSpec> scenario_blocks(const std::string& scenario,
                                            std::uint64_t seed) {
  using sim::BlockKind;
  using sim::BlockSpec;
  if (scenario == "straight") {
    return {BlockSpec{BlockKind::Straight, 200.0, 0.0}};
  }
  if (scenario == "merge") {
    return {BlockSpec{BlockKind::Straight, 60.0, 0.0},
            BlockSpec{BlockKind::Merge, 140.0, 0.0}};
  }
  if (scenario == "intersection") {
    return {BlockSpec{BlockKind::Straight, 60.0, 0.0},
            BlockSpec{BlockKind::Intersection, 120.0, 0.0}};
  }
  if (scenario == "t_intersection") {
    return {BlockSpec{BlockKind::Straight, 60.0, 0.0},
            BlockSpec{BlockKind::TIntersection, 120.0, 0.0}};
  }
  if (scenario == "circular") {
    return {BlockSpec{BlockKind::Straight, 50.0, 0.0},
            BlockSpec{BlockKind::Circular, 0.0, 45.0},
            BlockSpec{BlockKind::Straight, 50.0, 0.0}};
  }
  if (scenario == "roundabout") {
    return {BlockSpec{BlockKind::Straight, 50.0, 0.0},
            BlockSpec{BlockKind::Roundabout, 60.0, 20.0},
            BlockSpec{BlockKind::Straight, 50.0, 0.0}};
  }
  if (scenario == "mix") {
    // three random kinds from the single-block roster
    static const BlockKind roster[] = {BlockKind::Straight, BlockKind::Merge,
                                       BlockKind::Intersection,
                                       BlockKind::TIntersection,
                                       BlockKind::Circular};
    Rng rng = Rng::derive(seed, 9001);
    std::vector<BlockSpec> blocks;
    for (int i = 0; i < 3; ++i) {
      const BlockKind kind = roster[rng.uniform_int(0, 4)];
      BlockSpec spec;
      spec.kind = kind;
      spec.length = kind == BlockKind::Straight ? 100.0 : 90.0;
      spec.radius = 45.0;
      blocks.push_back(spec);
    }
    return blocks;
  }
  throw ConfigError("unknown scenario: " + scenario);
}

}  // namespace marlot::harness
