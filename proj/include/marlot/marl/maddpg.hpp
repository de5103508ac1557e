#pragma once

#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "marlot/arena/arena.hpp"
#include "marlot/arena/reward.hpp"
#include "marlot/marl/checkpoint.hpp"
#include "marlot/marl/mlp.hpp"
#include "marlot/rng.hpp"

namespace marlot::marl {

struct MarlError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct NoiseSchedule {
  double scale = 0.75;
  double decay = 0.999995;
  double floor = 0.01;

  void advance() { scale = std::max(floor, scale * decay); }
};

enum class Algo { Maddpg, IndependentDdpg };

struct TrainConfig {
  Algo algo = Algo::Maddpg;
  int hidden = 128;
  double lr = 0.001;
  double gamma = 0.95;
  double tau = 0.01;
  int batch = 256;
  int buffer_capacity = 100000;
  int update_every = 8;   // env steps between gradient updates
  int warmup_steps = 2000;
  int episodes = 1000;
  double noise_init = 0.75;
  double noise_decay = 0.999995;
  double noise_floor = 0.01;
  // L2 penalty on the actors' pre-squash outputs. Without it an actor that
  // pins an action to the box edge saturates its tanh and the policy
  // gradient for that dimension dies permanently.
  double actor_reg = 1e-3;
  double divergence_q = 1e4;  // abort when mean |Q| exceeds this
  std::uint64_t seed = 1;
};

struct TrainEnv {
  arena::ArenaConfig arena;
  arena::RewardWeights weights;
};

/// Width of a critic's input: the joint state and action for MADDPG,
/// one agent's own state and action when cooperation is removed.
constexpr int critic_input_dim(Algo algo, int n_learners, int obs_dim,
                               int act_dim) {
  return algo == Algo::Maddpg ? n_learners * (obs_dim + act_dim)
                              : obs_dim + act_dim;
}

/// One learner: decentralized actor plus (for MADDPG) a critic conditioned
/// on the joint state and action.
struct Agent {
  Mlp actor, critic, actor_target, critic_target;
  AdamState actor_opt, critic_opt;
  arena::ActionBox box;
  int obs_dim = 0;
};

/// Squashed deterministic policy output; bounded sigmoid-style maps rescale
/// the raw net output into the asymmetric action box. Throws on state
/// dimension mismatch.
arena::AgentAction actor_forward(const Mlp& actor, const arena::ActionBox& box,
                                 std::span<const double> state);

/// Exploration action: actor output plus Gaussian noise scaled by the
/// schedule and the per-dimension half-range, clamped to the box. Advances
/// the schedule.
arena::AgentAction select_action(const Mlp& actor, const arena::ActionBox& box,
                                 std::span<const double> state,
                                 NoiseSchedule& noise, Rng& rng);

/// Joint transitions, flat ring buffer.
class ReplayBuffer {
 public:
  ReplayBuffer(int capacity, int obs_total, int act_total, int n_rewards);

  void push(std::span<const double> obs, std::span<const double> act,
            std::span<const double> rewards, std::span<const double> next_obs,
            bool done);
  int size() const { return size_; }
  int capacity() const { return capacity_; }

  int obs_total() const { return obs_total_; }
  int act_total() const { return act_total_; }
  int n_rewards() const { return n_rewards_; }

  const double* obs_row(int i) const { return obs_.data() + static_cast<std::size_t>(i) * obs_total_; }
  const double* act_row(int i) const { return act_.data() + static_cast<std::size_t>(i) * act_total_; }
  const double* rew_row(int i) const { return rew_.data() + static_cast<std::size_t>(i) * n_rewards_; }
  const double* next_obs_row(int i) const { return next_obs_.data() + static_cast<std::size_t>(i) * obs_total_; }
  bool done_at(int i) const { return done_[i] != 0; }

 private:
  int capacity_, obs_total_, act_total_, n_rewards_;
  int size_ = 0, head_ = 0;
  std::vector<double> obs_, act_, rew_, next_obs_;
  std::vector<std::uint8_t> done_;
};

struct UpdateLosses {
  std::vector<double> critic_loss;
  std::vector<double> actor_loss;
  double mean_abs_q = 0.0;
};

/// One MADDPG gradient step over a uniform minibatch: critics regress on the
/// soft-target bootstrap, actors ascend their critic, targets soft-update.
/// For IndependentDdpg each critic sees only its own observation/action.
/// Throws MarlError when the buffer holds fewer than `batch` transitions or
/// a loss goes non-finite.
UpdateLosses maddpg_update(std::vector<Agent>& agents, const ReplayBuffer& buffer,
                           int batch, Algo algo, double gamma, double tau,
                           double lr, Rng& rng, double actor_reg = 1e-3);

/// Full training loop in the arena. Deterministic per seed.
Checkpoint train(const TrainEnv& env, const TrainConfig& cfg);

struct EvalStats {
  double enclosure_success_rate = 0.0;  // fraction of episodes that close
  double mean_initial_distance = 0.0;
  double mean_final_distance = 0.0;
  int episodes = 0;
};

/// Greedy rollout of a checkpoint in the arena (no exploration noise).
EvalStats evaluate(const Checkpoint& ckpt, const TrainEnv& env, int episodes,
                   std::uint64_t seed);

/// Rebuilds an actor net from checkpoint parameters (f32 widened to f64).
Mlp actor_from_checkpoint(const Checkpoint& ckpt, int agent_index);

}  // namespace marlot::marl
