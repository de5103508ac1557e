#include "marlot/baselines/controllers.hpp"
#include "marlot/baselines/nsga2.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "doctest.h"

using namespace marlot;
using baselines::Chromosome;
using baselines::GaConfig;
using baselines::GaEpisodeOutcome;

namespace {

// Brute-force dominance ranks (maximization) for small populations.
std::vector<int> brute_force_ranks(
    const std::vector<std::vector<double>>& objs) {
  const auto dominates = [](const std::vector<double>& a,
                            const std::vector<double>& b) {
    bool strict = false;
    for (std::size_t i = 0; i < a.size(); ++i) {
      if (a[i] < b[i]) return false;
      if (a[i] > b[i]) strict = true;
    }
    return strict;
  };
  const int n = static_cast<int>(objs.size());
  std::vector<int> rank(n, -1);
  std::vector<bool> assigned(n, false);
  int level = 0;
  int remaining = n;
  while (remaining > 0) {
    std::vector<int> front;
    for (int i = 0; i < n; ++i) {
      if (assigned[i]) continue;
      bool dominated = false;
      for (int j = 0; j < n; ++j) {
        if (j == i || assigned[j]) continue;
        if (dominates(objs[j], objs[i])) {
          dominated = true;
          break;
        }
      }
      if (!dominated) front.push_back(i);
    }
    for (int i : front) {
      rank[i] = level;
      assigned[i] = true;
      --remaining;
    }
    ++level;
  }
  return rank;
}

std::vector<std::vector<Maneuver>> flatten(const std::vector<Chromosome>& pop) {
  std::vector<std::vector<Maneuver>> genes;
  for (const auto& c : pop) {
    for (const auto& seq : c.genes) genes.push_back(seq);
  }
  std::sort(genes.begin(), genes.end());
  return genes;
}

}  // namespace

TEST_CASE("random maneuvers are uniform within half a percent") {
  Rng rng(60221);
  std::map<Maneuver, int> counts;
  const int total = 100000;
  for (int i = 0; i < total; ++i) counts[baselines::random_maneuver(rng)] += 1;
  for (const Maneuver m : kAllManeuvers) {
    const double freq = static_cast<double>(counts[m]) / total;
    CHECK(std::abs(freq - 0.2) < 0.005);
  }
}

TEST_CASE("random draws are seed-deterministic") {
  Rng a(5), b(5);
  for (int i = 0; i < 1000; ++i) {
    CHECK(baselines::random_maneuver(a) == baselines::random_maneuver(b));
  }
}

TEST_CASE("non-dominated sorting matches brute force on small populations") {
  Rng rng(1234);
  for (int trial = 0; trial < 200; ++trial) {
    const int n = rng.uniform_int(1, 10);
    const int m = rng.uniform_int(1, 3);
    std::vector<std::vector<double>> objs(n, std::vector<double>(m));
    for (auto& row : objs) {
      for (auto& v : row) v = rng.uniform_int(0, 4);  // ties likely
    }
    CHECK(baselines::non_dominated_ranks(objs) == brute_force_ranks(objs));
  }
}

TEST_CASE("crowding distance: boundary points are infinite") {
  const std::vector<std::vector<double>> objs = {{0.0}, {1.0}, {2.0}, {5.0}};
  const std::vector<int> front = {0, 1, 2, 3};
  const auto crowd = baselines::crowding_distances(objs, front);
  CHECK(std::isinf(crowd[0]));
  CHECK(std::isinf(crowd[3]));
  CHECK(crowd[1] < crowd[2]);
}

TEST_CASE("ga: budget 200 with population 10 runs 20 generations") {
  GaConfig cfg;
  Rng rng(9);
  int episodes_seen = 0;
  const auto evaluator = [&](const Chromosome&, int idx) {
    CHECK(idx == episodes_seen);
    ++episodes_seen;
    return GaEpisodeOutcome{false, 5.0};
  };
  const auto result = baselines::ga_run(3, 40, 200, evaluator, cfg, rng);
  CHECK(result.episodes_used == 200);
  CHECK(episodes_seen == 200);
  CHECK(result.generations == 20);
}

TEST_CASE("ga: budget exhausted mid-generation evaluates a partial batch") {
  GaConfig cfg;
  Rng rng(10);
  const auto evaluator = [&](const Chromosome&, int) {
    return GaEpisodeOutcome{false, 3.0};
  };
  const auto result = baselines::ga_run(3, 40, 23, evaluator, cfg, rng);
  CHECK(result.episodes_used == 23);
  CHECK(result.generations == 3);  // 10 + 10 + partial 3
}

TEST_CASE("ga: every violating episode pins the fitness at 20") {
  GaConfig cfg;
  Rng rng(11);
  const auto evaluator = [&](const Chromosome&, int) {
    return GaEpisodeOutcome{true, 0.0};
  };
  const auto result = baselines::ga_run(2, 20, 10, evaluator, cfg, rng);
  CHECK(result.episodes_used == 10);
  for (const auto& c : result.final_population) {
    REQUIRE(c.fitness.size() == 1);
    CHECK(c.fitness[0] == doctest::Approx(20.0));
  }
  CHECK(std::count(result.violations.begin(), result.violations.end(), true) ==
        10);
}

TEST_CASE("ga: zero variation reproduces generation 0 as a multiset") {
  GaConfig cfg;
  cfg.crossover_rate = 0.0;
  cfg.mutation_rate = 0.0;
  Rng rng(12);
  std::vector<Chromosome> generation0;
  const auto evaluator = [&](const Chromosome& c, int idx) {
    if (idx < cfg.population) generation0.push_back(c);
    return GaEpisodeOutcome{false, 1.0 + 0.1 * idx};
  };
  const auto result = baselines::ga_run(2, 15, 20, evaluator, cfg, rng);
  CHECK(result.episodes_used == 20);
  // selection can only permute/copy members of generation 0
  const auto pool = flatten(generation0);
  for (const auto& c : result.final_population) {
    for (const auto& seq : c.genes) {
      CHECK(std::binary_search(pool.begin(), pool.end(), seq));
    }
  }
}

TEST_CASE("single-rl critics see one agent's state and action only") {
  using marl::Algo;
  const int obs = arena::obs_dim(3);
  CHECK(marl::critic_input_dim(Algo::IndependentDdpg, 4, obs, 2) == obs + 2);
  CHECK(marl::critic_input_dim(Algo::Maddpg, 4, obs, 2) == 4 * (obs + 2));
}

TEST_CASE("single-rl training is deterministic and approaches the evader") {
  marl::TrainEnv env;
  env.arena.n = 3;
  env.arena.learned_evader = false;  // scripted evader for the baseline test
  env.arena.episode_cap = 60;

  marl::TrainConfig cfg;
  cfg.hidden = 32;
  cfg.batch = 64;
  cfg.buffer_capacity = 20000;
  cfg.warmup_steps = 500;
  cfg.update_every = 4;
  cfg.episodes = 220;
  cfg.seed = 31;

  const auto a = baselines::single_rl_train(env, cfg);
  CHECK(a.algo == "iddpg");
  const auto b = baselines::single_rl_train(env, cfg);
  REQUIRE(a.actor_count() == b.actor_count());
  for (int i = 0; i < a.actor_count(); ++i) {
    REQUIRE(a.actors[i].values == b.actors[i].values);
  }

  const auto stats = marl::evaluate(a, env, 100, 77);
  CHECK(stats.mean_final_distance < stats.mean_initial_distance);
}
