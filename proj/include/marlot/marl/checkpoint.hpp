#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace marlot::marl {

struct CheckpointError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Trained policy bundle: actor parameters for every learner plus run
/// metadata. Parameters are stored as little-endian float32 both in memory
/// and on disk, so save -> load round-trips are lossless.
struct Checkpoint {
  static constexpr int kVersion = 1;

  int version = kVersion;
  std::string algo = "maddpg";  // "maddpg" | "iddpg"
  int n_agents = 0;             // surrounding-vehicle learners
  bool learned_evader = false;  // when true, the last actor is the evader
  int obs_dim = 0;
  int act_dim = 2;
  int hidden = 128;
  std::uint64_t seed = 0;
  int episodes = 0;
  double final_noise = 0.0;
  std::vector<double> reward_curve;  // per-episode mean pursuer return

  struct NetBlob {
    std::string name;
    std::vector<float> values;
  };
  std::vector<NetBlob> actors;  // pursuers [0..n), then optionally "evader"

  int actor_count() const { return static_cast<int>(actors.size()); }

  /// Rejects use under a mismatched agent count or observation layout.
  void expect_compatible(int n_agents_wanted, int obs_dim_wanted) const;
};

void save_checkpoint(const Checkpoint& ckpt, const std::string& path);

/// Throws CheckpointError on unreadable, truncated, corrupt or
/// version-mismatched files.
Checkpoint load_checkpoint(const std::string& path);

}  // namespace marlot::marl
