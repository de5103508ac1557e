#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "json.hpp"
#include "marlot/arena/arena.hpp"
#include "marlot/arena/reward.hpp"
#include "marlot/baselines/nsga2.hpp"
#include "marlot/fuzzer/pattern.hpp"
#include "marlot/marl/maddpg.hpp"
#include "marlot/sim/road.hpp"
#include "marlot/sim/vehicle.hpp"
#include "marlot/sut/policy.hpp"

namespace marlot::harness {

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Whole-run configuration tree. Every knob has a default; a config file or
/// CLI flag overrides individual keys.
struct Config {
  std::string scenario = "straight";
  int lanes = 2;
  std::string sut = "idm";         // idm | heuristic
  std::string method = "marl_ot";  // marl_ot | random | ga | single_rl
  int budget = 200;
  int repetitions = 5;
  std::uint64_t seed = 1;
  std::string checkpoint_path;
  int n_svs = 3;

  sim::SimParams sim;
  sut::SutConfig sut_cfg;
  fuzzer::FuzzerConfig fuzzer;
  arena::RewardWeights reward;
  arena::ArenaConfig arena;
  marl::TrainConfig train;
  baselines::GaConfig ga;

  // episode shaping
  double spawn_span = 18.0;        // SV spawn offset range around the ego
  double ego_initial_speed = 10.0;
  double sv_speed_min = 5.0;
  double sv_speed_max = 12.0;
  int step_cap_min = 600;
  // violation oracle
  int stall_steps = 100;
  int reverse_steps = 5;
  double reverse_speed_threshold = -0.1;
  double stall_speed_threshold = 0.1;
};

Config config_from_json(const nlohmann::json& j);
nlohmann::ordered_json config_to_json(const Config& cfg);
Config load_config_file(const std::string& path);

/// Block roster for a named scenario; "mix" draws 3 random block kinds from
/// the roster using the seed.
std::vector<sim::BlockSpec> scenario_blocks(const std::string& scenario,
                                            std::uint64_t seed);

const std::vector<std::string>& scenario_names();

}  // namespace marlot::harness
