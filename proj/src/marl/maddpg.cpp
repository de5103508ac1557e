#include "marlot/marl/maddpg.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace marlot::marl {

namespace {

void squash_pair(const arena::ActionBox& box, const double* raw,
                 arena::AgentAction* out) {
  out->dvx = box.x_mid() + box.x_half() * std::tanh(raw[0]);
  out->dvy = box.y_mid() + box.y_half() * std::tanh(raw[1]);
}

// d(squashed)/d(raw) at the cached raw outputs
void squash_grad(const arena::ActionBox& box, const double* raw, double* g) {
  const double t0 = std::tanh(raw[0]);
  const double t1 = std::tanh(raw[1]);
  g[0] = box.x_half() * (1.0 - t0 * t0);
  g[1] = box.y_half() * (1.0 - t1 * t1);
}

Checkpoint::NetBlob to_blob(const std::string& name, const Mlp& net) {
  Checkpoint::NetBlob blob;
  blob.name = name;
  blob.values.reserve(net.param_count());
  for (const auto* tensor : net.tensors()) {
    for (double v : *tensor) blob.values.push_back(static_cast<float>(v));
  }
  return blob;
}

}  // namespace

arena::AgentAction actor_forward(const Mlp& actor, const arena::ActionBox& box,
                                 std::span<const double> state) {
  if (static_cast<int>(state.size()) != actor.in) {
    throw MarlError("actor state dimension mismatch: got " +
                    std::to_string(state.size()) + ", expected " +
                    std::to_string(actor.in));
  }
  MlpCache cache;
  mlp_forward(actor, state.data(), 1, cache);
  arena::AgentAction a;
  squash_pair(box, cache.y.data(), &a);
  return a;
}

arena::AgentAction select_action(const Mlp& actor, const arena::ActionBox& box,
                                 std::span<const double> state,
                                 NoiseSchedule& noise, Rng& rng) {
  arena::AgentAction a = actor_forward(actor, box, state);
  a.dvx += rng.gaussian() * noise.scale * box.x_half();
  a.dvy += rng.gaussian() * noise.scale * box.y_half();
  noise.advance();
  return box.clamp(a);
}

ReplayBuffer::ReplayBuffer(int capacity, int obs_total, int act_total,
                           int n_rewards)
    : capacity_(capacity),
      obs_total_(obs_total),
      act_total_(act_total),
      n_rewards_(n_rewards) {
  obs_.resize(static_cast<std::size_t>(capacity) * obs_total);
  act_.resize(static_cast<std::size_t>(capacity) * act_total);
  rew_.resize(static_cast<std::size_t>(capacity) * n_rewards);
  next_obs_.resize(static_cast<std::size_t>(capacity) * obs_total);
  done_.resize(capacity, 0);
}

void ReplayBuffer::push(std::span<const double> obs, std::span<const double> act,
                        std::span<const double> rewards,
                        std::span<const double> next_obs, bool done) {
  const int i = head_;
  std::copy(obs.begin(), obs.end(),
            obs_.begin() + static_cast<std::size_t>(i) * obs_total_);
  std::copy(act.begin(), act.end(),
            act_.begin() + static_cast<std::size_t>(i) * act_total_);
  std::copy(rewards.begin(), rewards.end(),
            rew_.begin() + static_cast<std::size_t>(i) * n_rewards_);
  std::copy(next_obs.begin(), next_obs.end(),
            next_obs_.begin() + static_cast<std::size_t>(i) * obs_total_);
  done_[i] = done ? 1 : 0;
  head_ = (head_ + 1) % capacity_;
  size_ = std::min(size_ + 1, capacity_);
}

UpdateLosses maddpg_update(std::vector<Agent>& agents,
                           const ReplayBuffer& buffer, int batch, Algo algo,
                           double gamma, double tau, double lr, Rng& rng,
                           double actor_reg) {
  if (buffer.size() < batch) {
    throw MarlError("replay buffer holds fewer transitions than batch size");
  }
  const int n_ag = static_cast<int>(agents.size());
  const int obs_dim = agents[0].obs_dim;
  const int act_dim = 2;
  const int obs_total = buffer.obs_total();
  const int act_total = buffer.act_total();

  std::vector<int> idx(batch);
  for (int& i : idx) i = rng.uniform_int(0, buffer.size() - 1);

  std::vector<double> obs_all(static_cast<std::size_t>(batch) * obs_total);
  std::vector<double> act_all(static_cast<std::size_t>(batch) * act_total);
  std::vector<double> next_all(static_cast<std::size_t>(batch) * obs_total);
  std::vector<double> rew(static_cast<std::size_t>(batch) * n_ag);
  std::vector<double> not_done(batch);
  for (int b = 0; b < batch; ++b) {
    const int i = idx[b];
    std::copy_n(buffer.obs_row(i), obs_total, obs_all.begin() + static_cast<std::size_t>(b) * obs_total);
    std::copy_n(buffer.act_row(i), act_total, act_all.begin() + static_cast<std::size_t>(b) * act_total);
    std::copy_n(buffer.next_obs_row(i), obs_total, next_all.begin() + static_cast<std::size_t>(b) * obs_total);
    std::copy_n(buffer.rew_row(i), n_ag, rew.begin() + static_cast<std::size_t>(b) * n_ag);
    not_done[b] = buffer.done_at(i) ? 0.0 : 1.0;
  }

  // Next joint action under the target policies.
  std::vector<double> next_act(static_cast<std::size_t>(batch) * act_total);
  std::vector<double> obs_j(static_cast<std::size_t>(batch) * obs_dim);
  MlpCache scratch;
  for (int j = 0; j < n_ag; ++j) {
    for (int b = 0; b < batch; ++b) {
      std::copy_n(next_all.data() + static_cast<std::size_t>(b) * obs_total +
                      static_cast<std::size_t>(j) * obs_dim,
                  obs_dim, obs_j.begin() + static_cast<std::size_t>(b) * obs_dim);
    }
    mlp_forward(agents[j].actor_target, obs_j.data(), batch, scratch);
    for (int b = 0; b < batch; ++b) {
      arena::AgentAction a;
      squash_pair(agents[j].box, scratch.y.data() + static_cast<std::size_t>(b) * act_dim, &a);
      next_act[static_cast<std::size_t>(b) * act_total + j * act_dim] = a.dvx;
      next_act[static_cast<std::size_t>(b) * act_total + j * act_dim + 1] = a.dvy;
    }
  }

  const auto critic_input = [&](int k, const std::vector<double>& obs_src,
                                const std::vector<double>& act_src,
                                std::vector<double>& out) {
    if (algo == Algo::Maddpg) {
      const int width = obs_total + act_total;
      out.resize(static_cast<std::size_t>(batch) * width);
      for (int b = 0; b < batch; ++b) {
        double* row = out.data() + static_cast<std::size_t>(b) * width;
        std::copy_n(obs_src.data() + static_cast<std::size_t>(b) * obs_total, obs_total, row);
        std::copy_n(act_src.data() + static_cast<std::size_t>(b) * act_total, act_total, row + obs_total);
      }
    } else {
      const int width = obs_dim + act_dim;
      out.resize(static_cast<std::size_t>(batch) * width);
      for (int b = 0; b < batch; ++b) {
        double* row = out.data() + static_cast<std::size_t>(b) * width;
        std::copy_n(obs_src.data() + static_cast<std::size_t>(b) * obs_total +
                        static_cast<std::size_t>(k) * obs_dim,
                    obs_dim, row);
        std::copy_n(act_src.data() + static_cast<std::size_t>(b) * act_total +
                        static_cast<std::size_t>(k) * act_dim,
                    act_dim, row + obs_dim);
      }
    }
  };

  UpdateLosses losses;
  losses.critic_loss.resize(n_ag);
  losses.actor_loss.resize(n_ag);
  double abs_q_acc = 0.0;

  std::vector<double> xc, xn, xa, target_y(batch), dq(batch);
  MlpCache critic_cache, actor_cache, target_cache;
  MlpGrads critic_grads, actor_grads;

  for (int k = 0; k < n_ag; ++k) {
    Agent& ag = agents[k];

    // --- critic regression on the bootstrap target
    critic_input(k, next_all, next_act, xn);
    mlp_forward(ag.critic_target, xn.data(), batch, target_cache);
    for (int b = 0; b < batch; ++b) {
      target_y[b] = rew[static_cast<std::size_t>(b) * n_ag + k] +
                    gamma * not_done[b] * target_cache.y[b];
    }
    critic_input(k, obs_all, act_all, xc);
    mlp_forward(ag.critic, xc.data(), batch, critic_cache);
    double loss = 0.0;
    for (int b = 0; b < batch; ++b) {
      const double err = critic_cache.y[b] - target_y[b];
      loss += err * err;
      dq[b] = 2.0 * err / batch;
      abs_q_acc += std::abs(critic_cache.y[b]);
    }
    loss /= batch;
    losses.critic_loss[k] = loss;
    critic_grads.match(ag.critic);
    mlp_backward(ag.critic, critic_cache, dq.data(), critic_grads);
    clip_grad_norm(critic_grads, 0.5);
    adam_step(ag.critic, critic_grads, ag.critic_opt, lr);

    // --- actor ascends the (frozen) critic
    for (int b = 0; b < batch; ++b) {
      std::copy_n(obs_all.data() + static_cast<std::size_t>(b) * obs_total +
                      static_cast<std::size_t>(k) * obs_dim,
                  obs_dim, obs_j.begin() + static_cast<std::size_t>(b) * obs_dim);
    }
    mlp_forward(ag.actor, obs_j.data(), batch, actor_cache);
    std::vector<double> act_mix = act_all;
    for (int b = 0; b < batch; ++b) {
      arena::AgentAction a;
      squash_pair(ag.box, actor_cache.y.data() + static_cast<std::size_t>(b) * act_dim, &a);
      act_mix[static_cast<std::size_t>(b) * act_total + k * act_dim] = a.dvx;
      act_mix[static_cast<std::size_t>(b) * act_total + k * act_dim + 1] = a.dvy;
    }
    critic_input(k, obs_all, act_mix, xa);
    MlpCache q_cache;
    mlp_forward(ag.critic, xa.data(), batch, q_cache);
    double actor_loss = 0.0;
    for (int b = 0; b < batch; ++b) {
      actor_loss -= q_cache.y[b];
      dq[b] = -1.0 / batch;
    }
    actor_loss /= batch;
    losses.actor_loss[k] = actor_loss;

    const int width = algo == Algo::Maddpg ? obs_total + act_total
                                           : obs_dim + act_dim;
    std::vector<double> dxa(static_cast<std::size_t>(batch) * width);
    mlp_input_grad(ag.critic, q_cache, dq.data(), dxa.data());

    // chain rule through the squash into the raw actor outputs; the small
    // L2 term on the raw outputs keeps the tanh out of its flat tails
    std::vector<double> draw(static_cast<std::size_t>(batch) * act_dim);
    const int act_off = algo == Algo::Maddpg ? obs_total + k * act_dim : obs_dim;
    for (int b = 0; b < batch; ++b) {
      double sg[2];
      const double* raw =
          actor_cache.y.data() + static_cast<std::size_t>(b) * act_dim;
      squash_grad(ag.box, raw, sg);
      draw[static_cast<std::size_t>(b) * act_dim] =
          dxa[static_cast<std::size_t>(b) * width + act_off] * sg[0] +
          2.0 * actor_reg * raw[0] / batch;
      draw[static_cast<std::size_t>(b) * act_dim + 1] =
          dxa[static_cast<std::size_t>(b) * width + act_off + 1] * sg[1] +
          2.0 * actor_reg * raw[1] / batch;
    }
    actor_grads.match(ag.actor);
    mlp_backward(ag.actor, actor_cache, draw.data(), actor_grads);
    clip_grad_norm(actor_grads, 0.5);
    adam_step(ag.actor, actor_grads, ag.actor_opt, lr);

    if (!std::isfinite(losses.critic_loss[k]) ||
        !std::isfinite(losses.actor_loss[k])) {
      throw MarlError("non-finite loss in update (agent " + std::to_string(k) +
                      "): critic=" + std::to_string(losses.critic_loss[k]) +
                      " actor=" + std::to_string(losses.actor_loss[k]));
    }
  }

  for (auto& ag : agents) {
    soft_update(ag.actor, ag.actor_target, tau);
    soft_update(ag.critic, ag.critic_target, tau);
  }

  losses.mean_abs_q = abs_q_acc / (static_cast<double>(batch) * n_ag);
  return losses;
}

namespace {

std::vector<Agent> make_agents(const TrainEnv& env, const TrainConfig& cfg,
                               Rng& rng) {
  const int n = env.arena.n;
  const int n_learners = n + (env.arena.learned_evader ? 1 : 0);
  const int obs = arena::obs_dim(n);
  const int joint = critic_input_dim(cfg.algo, n_learners, obs, 2);
  std::vector<Agent> agents;
  agents.reserve(n_learners);
  for (int i = 0; i < n_learners; ++i) {
    Agent ag;
    ag.obs_dim = obs;
    ag.box = (i < n) ? arena::agent_box(env.arena) : arena::evader_box(env.arena);
    ag.actor = Mlp::create(obs, cfg.hidden, 2, rng);
    ag.critic = Mlp::create(joint, cfg.hidden, 1, rng);
    ag.actor_target = ag.actor;
    ag.critic_target = ag.critic;
    ag.actor_opt.match(ag.actor);
    ag.critic_opt.match(ag.critic);
    agents.push_back(std::move(ag));
  }
  return agents;
}

Checkpoint snapshot(const std::vector<Agent>& agents, const TrainEnv& env,
                    const TrainConfig& cfg, int episodes_done,
                    double final_noise, std::vector<double> reward_curve) {
  Checkpoint ckpt;
  ckpt.algo = cfg.algo == Algo::Maddpg ? "maddpg" : "iddpg";
  ckpt.n_agents = env.arena.n;
  ckpt.learned_evader = env.arena.learned_evader;
  ckpt.obs_dim = arena::obs_dim(env.arena.n);
  ckpt.hidden = cfg.hidden;
  ckpt.seed = cfg.seed;
  ckpt.episodes = episodes_done;
  ckpt.final_noise = final_noise;
  ckpt.reward_curve = std::move(reward_curve);
  for (int i = 0; i < env.arena.n; ++i) {
    ckpt.actors.push_back(to_blob("actor_" + std::to_string(i), agents[i].actor));
  }
  if (env.arena.learned_evader) {
    ckpt.actors.push_back(to_blob("evader", agents[env.arena.n].actor));
  }
  return ckpt;
}

}  // namespace

Checkpoint train(const TrainEnv& env, const TrainConfig& cfg) {
  const int n = env.arena.n;
  const int n_learners = n + (env.arena.learned_evader ? 1 : 0);
  const int obs = arena::obs_dim(n);

  Rng init_rng = Rng::derive(cfg.seed, 0);
  Rng env_rng = Rng::derive(cfg.seed, 1);
  Rng noise_rng = Rng::derive(cfg.seed, 2);
  Rng sample_rng = Rng::derive(cfg.seed, 3);

  auto agents = make_agents(env, cfg, init_rng);
  ReplayBuffer buffer(cfg.buffer_capacity, n_learners * obs, n_learners * 2,
                      n_learners);
  NoiseSchedule noise{cfg.noise_init, cfg.noise_decay, cfg.noise_floor};

  std::vector<double> reward_curve;
  reward_curve.reserve(cfg.episodes);
  long global_step = 0;

  std::vector<double> joint_obs(static_cast<std::size_t>(n_learners) * obs);
  std::vector<double> joint_next(static_cast<std::size_t>(n_learners) * obs);
  std::vector<double> joint_act(static_cast<std::size_t>(n_learners) * 2);
  std::vector<double> rewards(n_learners);

  for (int ep = 0; ep < cfg.episodes; ++ep) {
    arena::ArenaState st = arena_reset(env.arena, env_rng);
    std::vector<bool> touched(n, false);  // iddpg individual completion
    double ep_return = 0.0;
    int steps = 0;

    for (int t = 0; t < env.arena.episode_cap; ++t) {
      for (int i = 0; i < n; ++i) {
        const auto o = observe_agent(st, i);
        std::copy(o.begin(), o.end(), joint_obs.begin() + static_cast<std::size_t>(i) * obs);
      }
      std::vector<arena::AgentAction> acts(n);
      for (int i = 0; i < n; ++i) {
        acts[i] = select_action(
            agents[i].actor, agents[i].box,
            std::span<const double>(joint_obs.data() + static_cast<std::size_t>(i) * obs, obs),
            noise, noise_rng);
        joint_act[static_cast<std::size_t>(i) * 2] = acts[i].dvx;
        joint_act[static_cast<std::size_t>(i) * 2 + 1] = acts[i].dvy;
      }
      arena::AgentAction evader_act;
      if (env.arena.learned_evader) {
        const auto eo = observe_evader(st);
        std::copy(eo.begin(), eo.end(), joint_obs.begin() + static_cast<std::size_t>(n) * obs);
        evader_act = select_action(agents[n].actor, agents[n].box, eo, noise,
                                   noise_rng);
        joint_act[static_cast<std::size_t>(n) * 2] = evader_act.dvx;
        joint_act[static_cast<std::size_t>(n) * 2 + 1] = evader_act.dvy;
      } else {
        evader_act = scripted_evader(st, env.arena);
      }

      const arena::ArenaState next = arena_step(st, acts, evader_act, env.arena);
      const auto rr = agent_reward(st, next, env.weights);

      bool done = false;
      if (cfg.algo == Algo::Maddpg) {
        for (int i = 0; i < n; ++i) rewards[i] = rr.per_agent[i].total;
        done = rr.done;
      } else {
        // cooperative terms removed: own alignment plus an individual
        // first-touch bonus
        bool all_touched = true;
        for (int i = 0; i < n; ++i) {
          double bonus = 0.0;
          const double dist = geom::distance(next.pos[i], next.evader_pos);
          if (!touched[i] && dist <= env.weights.d_enclosure) {
            touched[i] = true;
            bonus = env.weights.completion;
          }
          rewards[i] = env.weights.mu1 * rr.per_agent[i].r_near +
                       env.weights.mu3 * bonus;
          all_touched = all_touched && touched[i];
        }
        done = all_touched;
      }
      if (env.arena.learned_evader) {
        rewards[n] = ego_reward(st, next);
      }

      for (int i = 0; i < n; ++i) {
        const auto o = observe_agent(next, i);
        std::copy(o.begin(), o.end(), joint_next.begin() + static_cast<std::size_t>(i) * obs);
      }
      if (env.arena.learned_evader) {
        const auto eo = observe_evader(next);
        std::copy(eo.begin(), eo.end(), joint_next.begin() + static_cast<std::size_t>(n) * obs);
      }

      buffer.push(joint_obs, joint_act, rewards, joint_next, done);
      for (int i = 0; i < n; ++i) ep_return += rewards[i];

      ++global_step;
      if (global_step >= cfg.warmup_steps && buffer.size() >= cfg.batch &&
          global_step % cfg.update_every == 0) {
        const auto losses =
            maddpg_update(agents, buffer, cfg.batch, cfg.algo, cfg.gamma,
                          cfg.tau, cfg.lr, sample_rng, cfg.actor_reg);
        if (losses.mean_abs_q > cfg.divergence_q) {
          throw MarlError("training diverged: mean |Q| = " +
                          std::to_string(losses.mean_abs_q));
        }
      }

      st = next;
      ++steps;
      if (done) break;
    }
    reward_curve.push_back(steps > 0 ? ep_return / (n * steps) : 0.0);
  }

  for (const auto& ag : agents) {
    if (!all_finite(ag.actor) || !all_finite(ag.critic)) {
      throw MarlError("non-finite parameters after training");
    }
  }
  return snapshot(agents, env, cfg, cfg.episodes, noise.scale,
                  std::move(reward_curve));
}

Mlp actor_from_checkpoint(const Checkpoint& ckpt, int agent_index) {
  if (agent_index < 0 || agent_index >= ckpt.actor_count()) {
    throw CheckpointError("actor index out of range");
  }
  Mlp net;
  net.in = ckpt.obs_dim;
  net.hidden = ckpt.hidden;
  net.out = ckpt.act_dim;
  const auto& vals = ckpt.actors[agent_index].values;
  net.w1.resize(static_cast<std::size_t>(net.hidden) * net.in);
  net.b1.resize(net.hidden);
  net.w2.resize(static_cast<std::size_t>(net.hidden) * net.hidden);
  net.b2.resize(net.hidden);
  net.w3.resize(static_cast<std::size_t>(net.out) * net.hidden);
  net.b3.resize(net.out);
  if (vals.size() != net.param_count()) {
    throw CheckpointError("actor parameter count mismatch");
  }
  std::size_t off = 0;
  for (auto* tensor : net.tensors()) {
    for (auto& v : *tensor) v = static_cast<double>(vals[off++]);
  }
  return net;
}

EvalStats evaluate(const Checkpoint& ckpt, const TrainEnv& env, int episodes,
                   std::uint64_t seed) {
  const int n = env.arena.n;
  ckpt.expect_compatible(n, arena::obs_dim(n));

  std::vector<Mlp> actors;
  for (int i = 0; i < n; ++i) actors.push_back(actor_from_checkpoint(ckpt, i));
  Mlp evader_actor;
  const bool learned = ckpt.learned_evader;
  if (learned) evader_actor = actor_from_checkpoint(ckpt, n);

  EvalStats stats;
  stats.episodes = episodes;
  Rng rng = Rng::derive(seed, 77);
  int successes = 0;
  double init_acc = 0.0, final_acc = 0.0;
  const bool individual_goal = ckpt.algo == "iddpg";

  for (int ep = 0; ep < episodes; ++ep) {
    arena::ArenaState st = arena_reset(env.arena, rng);
    for (int i = 0; i < n; ++i) {
      init_acc += geom::distance(st.pos[i], st.evader_pos) / n;
    }
    bool success = false;
    std::vector<bool> touched(n, false);
    for (int t = 0; t < env.arena.episode_cap; ++t) {
      std::vector<arena::AgentAction> acts(n);
      for (int i = 0; i < n; ++i) {
        acts[i] = actor_forward(actors[i], arena::agent_box(env.arena),
                                observe_agent(st, i));
      }
      arena::AgentAction ev;
      if (learned) {
        ev = actor_forward(evader_actor, arena::evader_box(env.arena),
                           observe_evader(st));
      } else {
        ev = scripted_evader(st, env.arena);
      }
      const arena::ArenaState next = arena_step(st, acts, ev, env.arena);
      const auto rr = agent_reward(st, next, env.weights);
      st = next;
      if (rr.done) {
        success = true;
        break;
      }
      if (individual_goal) {
        // the independent baseline trains toward per-agent touches; its
        // episodes end when everyone has reached the evader once
        bool all = true;
        for (int i = 0; i < n; ++i) {
          if (geom::distance(st.pos[i], st.evader_pos) <=
              env.weights.d_enclosure) {
            touched[i] = true;
          }
          all = all && touched[i];
        }
        if (all) break;
      }
    }
    for (int i = 0; i < n; ++i) {
      final_acc += geom::distance(st.pos[i], st.evader_pos) / n;
    }
    if (success) ++successes;
  }

  stats.enclosure_success_rate = static_cast<double>(successes) / episodes;
  stats.mean_initial_distance = init_acc / episodes;
  stats.mean_final_distance = final_acc / episodes;
  return stats;
}

}  // namespace marlot::marl
