#pragma once

#include <functional>
#include <vector>

#include "marlot/maneuver.hpp"
#include "marlot/rng.hpp"

namespace marlot::baselines {

/// Non-dominated sorting for maximization objectives: rank 0 is the
/// non-dominated front. a dominates b iff a is >= everywhere and > somewhere.
std::vector<int> non_dominated_ranks(
    const std::vector<std::vector<double>>& objectives);

/// Crowding distance within one front (indices into `objectives`).
std::vector<double> crowding_distances(
    const std::vector<std::vector<double>>& objectives,
    const std::vector<int>& front);

struct GaConfig {
  int population = 10;
  double crossover_rate = 0.9;
  double mutation_rate = 0.05;  // per gene
};

/// Offline chromosome: one fixed maneuver sequence per surrounding vehicle.
struct Chromosome {
  std::vector<std::vector<Maneuver>> genes;  // [sv][step]
  std::vector<double> fitness;               // maximized; empty = unevaluated
};

Chromosome random_chromosome(int n_svs, int length, Rng& rng);

struct GaEpisodeOutcome {
  bool violation = false;
  double min_gap = 0.0;  // smallest ego<->SV clearance seen in the episode
};

/// Runs one chromosome for one episode; `episode_index` is the global
/// evaluation counter (budget accounting and seeding).
using GaEvaluator =
    std::function<GaEpisodeOutcome(const Chromosome&, int episode_index)>;

struct GaResult {
  int episodes_used = 0;
  int generations = 0;
  std::vector<bool> violations;  // per episode, in evaluation order
  std::vector<Chromosome> final_population;
};

/// NSGA-II over maneuver sequences. A violation scores the fixed fitness 20;
/// otherwise fitness is -min_gap so that near misses are preferred. Runs
/// exactly `budget` episodes; a partial final generation is evaluated and
/// selection stops there.
GaResult ga_run(int n_svs, int gene_length, int budget,
                const GaEvaluator& evaluate, const GaConfig& cfg, Rng& rng);

/// Uniform draw over the five maneuvers.
Maneuver random_maneuver(Rng& rng);

}  // namespace marlot::baselines
