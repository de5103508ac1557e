#include "marlot/baselines/nsga2.hpp"

#include <algorithm>
#include <limits>

namespace marlot::baselines {

namespace {

bool dominates(const std::vector<double>& a, const std::vector<double>& b) {
  bool strictly = false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i] < b[i]) return false;
    if (a[i] > b[i]) strictly = true;
  }
  return strictly;
}

constexpr double kViolationFitness = 20.0;

}  // namespace

std::vector<int> non_dominated_ranks(
    const std::vector<std::vector<double>>& objectives) {
  const int n = static_cast<int>(objectives.size());
  std::vector<int> rank(n, -1);
  std::vector<int> domination_count(n, 0);
  std::vector<std::vector<int>> dominated_by(n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      if (i == j) continue;
      if (dominates(objectives[i], objectives[j])) {
        dominated_by[i].push_back(j);
      } else if (dominates(objectives[j], objectives[i])) {
        domination_count[i] += 1;
      }
    }
  }
  std::vector<int> current;
  for (int i = 0; i < n; ++i) {
    if (domination_count[i] == 0) {
      rank[i] = 0;
      current.push_back(i);
    }
  }
  int level = 0;
  while (!current.empty()) {
    std::vector<int> next;
    for (int i : current) {
      for (int j : dominated_by[i]) {
        if (--domination_count[j] == 0) {
          rank[j] = level + 1;
          next.push_back(j);
        }
      }
    }
    current = std::move(next);
    ++level;
  }
  return rank;
}

std::vector<double> crowding_distances(
    const std::vector<std::vector<double>>& objectives,
    const std::vector<int>& front) {
  const int m = static_cast<int>(front.size());
  std::vector<double> crowd(m, 0.0);
  if (m == 0) return crowd;
  const int n_obj = static_cast<int>(objectives[front[0]].size());
  for (int k = 0; k < n_obj; ++k) {
    std::vector<int> order(m);
    for (int i = 0; i < m; ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](int a, int b) {
      return objectives[front[a]][k] < objectives[front[b]][k];
    });
    crowd[order.front()] = std::numeric_limits<double>::infinity();
    crowd[order.back()] = std::numeric_limits<double>::infinity();
    const double lo = objectives[front[order.front()]][k];
    const double hi = objectives[front[order.back()]][k];
    if (hi - lo <= 0.0) continue;
    for (int i = 1; i + 1 < m; ++i) {
      crowd[order[i]] += (objectives[front[order[i + 1]]][k] -
                          objectives[front[order[i - 1]]][k]) /
                         (hi - lo);
    }
  }
  return crowd;
}

Chromosome random_chromosome(int n_svs, int length, Rng& rng) {
  Chromosome c;
  c.genes.resize(n_svs);
  for (auto& seq : c.genes) {
    seq.resize(length);
    for (auto& g : seq) g = random_maneuver(rng);
  }
  return c;
}

Maneuver random_maneuver(Rng& rng) {
  return kAllManeuvers[static_cast<std::size_t>(rng.uniform_int(0, 4))];
}

namespace {

std::vector<double> fitness_of(const GaEpisodeOutcome& outcome) {
  if (outcome.violation) return {kViolationFitness};
  return {-outcome.min_gap};
}

struct RankedPop {
  std::vector<int> rank;
  std::vector<double> crowd;
};

RankedPop rank_population(const std::vector<Chromosome>& pop) {
  std::vector<std::vector<double>> objs;
  objs.reserve(pop.size());
  for (const auto& c : pop) objs.push_back(c.fitness);
  RankedPop rp;
  rp.rank = non_dominated_ranks(objs);
  rp.crowd.assign(pop.size(), 0.0);
  const int max_rank =
      *std::max_element(rp.rank.begin(), rp.rank.end());
  for (int level = 0; level <= max_rank; ++level) {
    std::vector<int> front;
    for (int i = 0; i < static_cast<int>(pop.size()); ++i) {
      if (rp.rank[i] == level) front.push_back(i);
    }
    const auto cd = crowding_distances(objs, front);
    for (std::size_t k = 0; k < front.size(); ++k) rp.crowd[front[k]] = cd[k];
  }
  return rp;
}

int tournament(const RankedPop& rp, Rng& rng) {
  const int n = static_cast<int>(rp.rank.size());
  const int a = rng.uniform_int(0, n - 1);
  const int b = rng.uniform_int(0, n - 1);
  if (rp.rank[a] != rp.rank[b]) return rp.rank[a] < rp.rank[b] ? a : b;
  return rp.crowd[a] >= rp.crowd[b] ? a : b;
}

void crossover(Chromosome& a, Chromosome& b, double rate, Rng& rng) {
  for (std::size_t sv = 0; sv < a.genes.size(); ++sv) {
    if (!rng.bernoulli(rate)) continue;
    const int len = static_cast<int>(a.genes[sv].size());
    if (len < 2) continue;
    const int point = rng.uniform_int(1, len - 1);
    for (int i = point; i < len; ++i) {
      std::swap(a.genes[sv][i], b.genes[sv][i]);
    }
  }
}

void mutate(Chromosome& c, double rate, Rng& rng) {
  for (auto& seq : c.genes) {
    for (auto& g : seq) {
      if (rng.bernoulli(rate)) g = random_maneuver(rng);
    }
  }
}

// Elitist truncation of parents + offspring to `size`.
std::vector<Chromosome> select_next(std::vector<Chromosome> combined,
                                    int size) {
  const auto rp = rank_population(combined);
  std::vector<int> order(combined.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = static_cast<int>(i);
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    if (rp.rank[a] != rp.rank[b]) return rp.rank[a] < rp.rank[b];
    return rp.crowd[a] > rp.crowd[b];
  });
  std::vector<Chromosome> next;
  next.reserve(size);
  for (int i = 0; i < size && i < static_cast<int>(order.size()); ++i) {
    next.push_back(std::move(combined[order[i]]));
  }
  return next;
}

}  // namespace

GaResult ga_run(int n_svs, int gene_length, int budget,
                const GaEvaluator& evaluate, const GaConfig& cfg, Rng& rng) {
  GaResult result;
  const int pop_size = cfg.population;

  std::vector<Chromosome> pop;
  pop.reserve(pop_size);
  for (int i = 0; i < pop_size; ++i) {
    pop.push_back(random_chromosome(n_svs, gene_length, rng));
  }

  const auto run_one = [&](Chromosome& c) {
    const auto outcome = evaluate(c, result.episodes_used);
    c.fitness = fitness_of(outcome);
    result.violations.push_back(outcome.violation);
    result.episodes_used += 1;
  };

  for (auto& c : pop) {
    if (result.episodes_used >= budget) break;
    run_one(c);
  }
  result.generations = 1;

  while (result.episodes_used < budget) {
    const auto rp = rank_population(pop);
    std::vector<Chromosome> offspring;
    offspring.reserve(pop_size);
    while (static_cast<int>(offspring.size()) < pop_size) {
      Chromosome a = pop[tournament(rp, rng)];
      Chromosome b = pop[tournament(rp, rng)];
      crossover(a, b, cfg.crossover_rate, rng);
      mutate(a, cfg.mutation_rate, rng);
      mutate(b, cfg.mutation_rate, rng);
      a.fitness.clear();
      b.fitness.clear();
      offspring.push_back(std::move(a));
      if (static_cast<int>(offspring.size()) < pop_size) {
        offspring.push_back(std::move(b));
      }
    }
    std::vector<Chromosome> evaluated;
    for (auto& c : offspring) {
      if (result.episodes_used >= budget) break;  // partial generation
      run_one(c);
      evaluated.push_back(std::move(c));
    }
    result.generations += 1;
    std::vector<Chromosome> combined = pop;
    for (auto& c : evaluated) combined.push_back(std::move(c));
    pop = select_next(std::move(combined), pop_size);
  }

  result.final_population = std::move(pop);
  return result;
}

}  // namespace marlot::baselines
