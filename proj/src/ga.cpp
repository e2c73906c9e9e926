#include "hsim/ga.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

#include <spdlog/spdlog.h>

#include "hsim/parallel.hpp"

namespace hsim {

namespace {

constexpr std::array<GeneBounds, kGeneCount> kBounds{{
    {0.0, 10.0},  // eta0
    {0.0, 10.0},  // eta
    {0.0, 1.0},   // alpha
    {0.0, 1.0},   // epsilon
    {0.0, 1.0},   // m
    {0.3, 0.9},   // c
    {0.0, 1.0},   // t
    {2.0, 20.0},  // maxhops
}};

constexpr std::array<std::string_view, kGeneCount> kNames{
    "eta0", "eta", "alpha", "epsilon", "m", "c", "t", "maxhops"};

Genome clamp(Genome g) {
  for (std::size_t i = 0; i < kGeneCount; ++i) {
    g.genes[i] = std::clamp(g.genes[i], kBounds[i].lo, kBounds[i].hi);
  }
  return g;
}

}  // namespace

const std::array<GeneBounds, kGeneCount>& gene_bounds() { return kBounds; }
const std::array<std::string_view, kGeneCount>& gene_names() { return kNames; }

bool within_bounds(const Genome& g) {
  for (std::size_t i = 0; i < kGeneCount; ++i) {
    if (!(g.genes[i] >= kBounds[i].lo && g.genes[i] <= kBounds[i].hi)) return false;
  }
  return true;
}

Genome encode(const ParameterSet& p) {
  return Genome{{p.eta0, p.eta, p.alpha, p.epsilon, p.m, p.c, p.t,
                 static_cast<double>(p.maxhops)}};
}

ParameterSet decode(const Genome& g) {
  ParameterSet p;
  p.eta0 = g.genes[0];
  p.eta = g.genes[1];
  p.alpha = g.genes[2];
  p.epsilon = g.genes[3];
  p.m = g.genes[4];
  p.c = g.genes[5];
  p.t = g.genes[6];
  p.maxhops = static_cast<int>(std::lround(g.genes[7]));
  return p;
}

Genome random_genome(Rng& rng) {
  Genome g;
  for (std::size_t i = 0; i < kGeneCount; ++i) {
    g.genes[i] = rng.uniform(kBounds[i].lo, kBounds[i].hi);
  }
  return g;
}

void GaConfig::validate() const {
  if (elite_count < 1) throw Error("ga: elite_count must be >= 1");
  if (elite_count > population_size) {
    throw Error("ga: elite_count exceeds population_size");
  }
  if (elite_count + mutant_count + crossover_count + fresh_count != population_size) {
    throw Error("ga: elites + mutants + crossovers + fresh must equal population_size");
  }
  if (generations < 1) throw Error("ga: generations must be >= 1");
  if (!(mutation_sigma >= 0.0)) throw Error("ga: mutation_sigma must be >= 0");
  if (seeds_per_eval < 1) throw Error("ga: seeds_per_eval must be >= 1");
}

double fitness(const Genome& genome, const Scenario& scenario,
               std::size_t seeds_per_eval) {
  double total = 0.0;
  for (std::size_t i = 0; i < seeds_per_eval; ++i) {
    Scenario s = scenario;
    s.params = decode(genome);
    s.seed = scenario.seed + i;
    s.trace_transfers = s.trace_slots = s.trace_hormone = false;
    try {
      total += static_cast<double>(run(s).slots_fulfilled);
    } catch (const Error& e) {
      spdlog::warn("ga: evaluation failed ({}), fitness 0", e.what());
    }
  }
  return total / static_cast<double>(seeds_per_eval);
}

std::vector<Genome> evolve(const std::vector<Genome>& population,
                           const std::vector<double>& fitnesses,
                           const GaConfig& config, Rng& rng) {
  config.validate();
  if (population.size() != config.population_size ||
      fitnesses.size() != population.size()) {
    throw Error("ga: population and fitness sizes must match population_size");
  }
  std::vector<std::size_t> order(population.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return fitnesses[a] > fitnesses[b];
  });

  std::vector<Genome> elites;
  for (std::size_t i = 0; i < config.elite_count; ++i) elites.push_back(population[order[i]]);

  std::vector<Genome> next = elites;
  for (std::size_t i = 0; i < config.mutant_count; ++i) {
    Genome g = elites[rng.below(elites.size())];
    for (std::size_t j = 0; j < kGeneCount; ++j) {
      g.genes[j] += rng.normal() * config.mutation_sigma * (kBounds[j].hi - kBounds[j].lo);
    }
    next.push_back(clamp(g));
  }
  for (std::size_t i = 0; i < config.crossover_count; ++i) {
    const std::size_t a = rng.below(elites.size());
    std::size_t b = a;
    if (elites.size() > 1) {
      b = rng.below(elites.size() - 1);
      if (b >= a) ++b;
    }
    Genome child;
    for (std::size_t j = 0; j < kGeneCount; ++j) {
      child.genes[j] = rng.bernoulli(0.5) ? elites[a].genes[j] : elites[b].genes[j];
    }
    next.push_back(child);
  }
  for (std::size_t i = 0; i < config.fresh_count; ++i) next.push_back(random_genome(rng));
  return next;
}

namespace {

// Evaluates every genome not yet in the cache, in parallel when jobs > 1.
void evaluate_missing(const std::vector<Genome>& population, const Evaluator& evaluate,
                      std::size_t jobs, std::map<Genome, double>& cache) {
  std::vector<Genome> todo;
  for (const Genome& g : population) {
    if (!cache.count(g) && std::find(todo.begin(), todo.end(), g) == todo.end()) {
      todo.push_back(g);
    }
  }
  std::vector<double> values(todo.size(), 0.0);
  parallel_for(todo.size(), jobs, [&](std::size_t i) { values[i] = evaluate(todo[i]); });
  for (std::size_t i = 0; i < todo.size(); ++i) cache[todo[i]] = values[i];
}

}  // namespace

OptimizeResult optimize(const Evaluator& evaluate, const GaConfig& config,
                        std::uint64_t seed,
                        const std::function<void(const GenerationStats&)>& on_generation) {
  config.validate();
  Rng rng = Rng::substream(seed, "ga");
  std::vector<Genome> population;
  for (std::size_t i = 0; i < config.population_size; ++i) population.push_back(random_genome(rng));

  std::map<Genome, double> cache;
  OptimizeResult result;
  bool have_best = false;
  for (std::size_t gen = 0; gen < config.generations; ++gen) {
    evaluate_missing(population, evaluate, config.jobs, cache);
    std::vector<double> fit;
    for (const Genome& g : population) fit.push_back(cache.at(g));

    GenerationStats stats;
    stats.generation = gen;
    std::size_t best_i = 0;
    for (std::size_t i = 1; i < fit.size(); ++i) {
      if (fit[i] > fit[best_i]) best_i = i;
    }
    stats.best_fitness = fit[best_i];
    stats.mean_fitness = std::accumulate(fit.begin(), fit.end(), 0.0) /
                         static_cast<double>(fit.size());
    if (!have_best || fit[best_i] > result.best_fitness) {
      result.best = population[best_i];
      result.best_fitness = fit[best_i];
      have_best = true;
    }
    stats.best_ever_fitness = result.best_fitness;
    stats.best_ever = result.best;
    result.history.push_back(stats);
    spdlog::info("ga generation {}: best {} mean {}", gen, stats.best_fitness,
                 stats.mean_fitness);
    if (on_generation) on_generation(stats);

    if (gen + 1 < config.generations) population = evolve(population, fit, config, rng);
  }
  return result;
}

OptimizeResult optimize(const Scenario& scenario, const GaConfig& config,
                        std::uint64_t seed,
                        const std::function<void(const GenerationStats&)>& on_generation) {
  scenario.validate();
  const std::size_t seeds = config.seeds_per_eval;
  return optimize([&](const Genome& g) { return fitness(g, scenario, seeds); }, config,
                  seed, on_generation);
}

}  // namespace hsim
