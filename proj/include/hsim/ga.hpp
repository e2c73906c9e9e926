#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <string_view>
#include <vector>

#include "hsim/engine.hpp"
#include "hsim/rng.hpp"

namespace hsim {

inline constexpr std::size_t kGeneCount = 8;

// Gene order: eta0, eta, alpha, epsilon, m, c, t, maxhops. maxhops is
// carried as a real and rounded on decode.
struct Genome {
  std::array<double, kGeneCount> genes{};
  friend bool operator==(const Genome&, const Genome&) = default;
  friend auto operator<=>(const Genome&, const Genome&) = default;
};

struct GeneBounds {
  double lo;
  double hi;
};

const std::array<GeneBounds, kGeneCount>& gene_bounds();
const std::array<std::string_view, kGeneCount>& gene_names();
bool within_bounds(const Genome& g);

Genome encode(const ParameterSet& p);
ParameterSet decode(const Genome& g);
Genome random_genome(Rng& rng);

struct GaConfig {
  std::size_t population_size = 20;
  std::size_t elite_count = 5;
  std::size_t mutant_count = 6;
  std::size_t crossover_count = 6;
  std::size_t fresh_count = 3;
  std::size_t generations = 30;
  double mutation_sigma = 0.10;  // fraction of each gene's range
  std::size_t seeds_per_eval = 3;
  std::size_t jobs = 1;

  void validate() const;
};

// Mean count of slots fulfilled in time over seeds_per_eval runs of the
// scenario with the genome's parameters. Run i uses seed scenario.seed + i.
// A run that fails to set up counts as 0.
double fitness(const Genome& genome, const Scenario& scenario,
               std::size_t seeds_per_eval);

// Next generation: elites (fitness descending, ties by index), mutants of
// random elites, uniform crossovers of two distinct random elites, then
// fresh random genomes.
std::vector<Genome> evolve(const std::vector<Genome>& population,
                           const std::vector<double>& fitnesses,
                           const GaConfig& config, Rng& rng);

struct GenerationStats {
  std::size_t generation = 0;
  double best_fitness = 0.0;       // best in this generation
  double mean_fitness = 0.0;
  double best_ever_fitness = 0.0;
  Genome best_ever;
};

struct OptimizeResult {
  Genome best;
  double best_fitness = 0.0;
  std::vector<GenerationStats> history;
};

// The evaluator is exposed so tests can run the loop on a cheap objective.
using Evaluator = std::function<double(const Genome&)>;

OptimizeResult optimize(const Evaluator& evaluate, const GaConfig& config,
                        std::uint64_t seed,
                        const std::function<void(const GenerationStats&)>& on_generation = {});
OptimizeResult optimize(const Scenario& scenario, const GaConfig& config,
                        std::uint64_t seed,
                        const std::function<void(const GenerationStats&)>& on_generation = {});

}  // namespace hsim
