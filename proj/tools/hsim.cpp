// hsim: command-line driver for the hormone-based delivery simulator.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <spdlog/spdlog.h>

#include "hsim/ga.hpp"
#include "hsim/report.hpp"
#include "hsim/scenario_io.hpp"
#include "hsim/sweep.hpp"

namespace fs = std::filesystem;
using namespace hsim;

namespace {

struct Common {
  std::string scenario_path;
  std::string preset = "random50";
  std::uint64_t seed = 0;
  bool seed_set = false;
  std::string out = "out";
  std::vector<std::string> sets;
  std::size_t jobs = 1;
};

void add_common(CLI::App* cmd, Common& c) {
  cmd->add_option("--scenario", c.scenario_path, "scenario file (key = value lines)");
  cmd->add_option("--preset", c.preset, "preset used when no scenario file is given")
      ->check(CLI::IsMember(preset_names()));
  cmd->add_option_function<std::uint64_t>(
      "--seed", [&c](std::uint64_t s) { c.seed = s; c.seed_set = true; }, "master seed");
  cmd->add_option("--out", c.out, "output directory");
  cmd->add_option("--set", c.sets, "override, key=value (repeatable)");
  cmd->add_option("--jobs", c.jobs, "parallel workers")->check(CLI::PositiveNumber);
}

// Scenario file or preset, then --seed, then the --set overrides in order.
Scenario load(const Common& c, Overrides& applied) {
  Scenario s = c.scenario_path.empty() ? preset_scenario(c.preset) : load_scenario(c.scenario_path);
  if (c.seed_set) s.seed = c.seed;
  for (const std::string& kv : c.sets) {
    apply_override(s, kv);
    const auto eq = kv.find('=');
    applied.emplace_back(kv.substr(0, eq), kv.substr(eq + 1));
  }
  s.validate();
  return s;
}

template <typename T, typename Parse>
std::vector<T> parse_list(const std::string& text, Parse parse) {
  std::vector<T> out;
  std::size_t start = 0;
  while (start <= text.size()) {
    const auto comma = text.find(',', start);
    const std::string item = text.substr(start, comma == std::string::npos ? std::string::npos : comma - start);
    if (!item.empty()) out.push_back(parse(item));
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return out;
}

void init_logging() {
  spdlog::set_level(spdlog::level::warn);
  if (const char* env = std::getenv("HS_LOG")) {
    const auto level = spdlog::level::from_str(env);
    spdlog::set_level(level);
  }
}

int cmd_run(const Common& c) {
  Overrides applied;
  const Scenario s = load(c, applied);
  const MetricsLog log = run_to_directory(s, c.out, applied);
  std::cout << "wrote " << c.out << " (" << log.slots_fulfilled << " fulfilled, "
            << log.slots_missed << " missed)\n";
  return 0;
}

int cmd_sweep(const Common& c, const std::string& replication, const std::string& cleanup,
              const std::string& churn, const std::string& seeds) {
  Overrides applied;
  const Scenario base = load(c, applied);
  SweepAxes axes;
  if (replication == "all") {
    axes.replication.assign(kAllReplicationStrategies.begin(), kAllReplicationStrategies.end());
  } else {
    axes.replication = parse_list<ReplicationStrategy>(
        replication, [](const std::string& v) { return parse_replication(v); });
  }
  axes.cleanup = parse_list<CleanupPolicy>(cleanup, [](const std::string& v) { return parse_cleanup(v); });
  axes.churn = parse_list<std::size_t>(churn, [](const std::string& v) { return std::stoul(v); });
  axes.seeds = parse_list<std::uint64_t>(seeds, [](const std::string& v) { return std::stoull(v); });
  const auto cells = sweep_matrix(axes);
  const auto rows = run_sweep(base, cells, c.out, c.jobs, applied);
  std::size_t failed = 0;
  for (const auto& r : rows) failed += r.ok ? 0 : 1;
  std::cout << "sweep: " << rows.size() - failed << " of " << rows.size() << " cells ok, "
            << (fs::path(c.out) / "sweep.csv").string() << "\n";
  return failed == 0 ? 0 : 1;
}

int cmd_optimize(const Common& c, GaConfig ga) {
  Overrides applied;
  const Scenario s = load(c, applied);
  ga.jobs = c.jobs;
  fs::create_directories(c.out);
  std::ofstream gens(fs::path(c.out) / "ga_generations.csv", std::ios::binary);
  if (!gens) throw Error("cannot write ga_generations.csv");
  gens << "generation,best_fitness,mean_fitness,best_ever_fitness";
  for (auto name : gene_names()) gens << ",best_" << name;
  gens << '\n';
  const auto result = optimize(s, ga, s.seed, [&](const GenerationStats& g) {
    gens << g.generation << ',' << format_double(g.best_fitness) << ','
         << format_double(g.mean_fitness) << ',' << format_double(g.best_ever_fitness);
    for (double v : g.best_ever.genes) gens << ',' << format_double(v);
    gens << '\n';
    gens.flush();
  });
  Scenario best = s;
  best.params = decode(result.best);
  std::ofstream cfg(fs::path(c.out) / "best.cfg", std::ios::binary);
  if (!cfg) throw Error("cannot write best.cfg");
  cfg << "# best genome, fitness " << format_double(result.best_fitness) << '\n';
  write_scenario(cfg, best);
  std::cout << "best fitness " << result.best_fitness << ", wrote "
            << (fs::path(c.out) / "best.cfg").string() << "\n";
  return 0;
}

int cmd_topo(const Common& c, int calibrate, int calibrate_seeds) {
  Overrides applied;
  Scenario s = load(c, applied);
  if (calibrate > 0) {
    const auto cal = calibrate_edge_probability(s.random, calibrate, calibrate_seeds);
    std::cout << "edge_probability " << format_double(cal.edge_probability) << " (median diameter "
              << calibrate << " for p in [" << format_double(cal.range_low) << ", "
              << format_double(cal.range_high) << "))\n";
    s.random.edge_probability = cal.edge_probability;
  }
  const Overlay o = build_overlay(s);
  fs::create_directories(c.out);
  const fs::path path = fs::path(c.out) / "overlay.txt";
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  write_edge_list(out, o);
  std::size_t max_degree = 0;
  for (NodeId v = 0; v < o.node_count(); ++v) max_degree = std::max(max_degree, o.degree(v));
  std::cout << "nodes " << o.node_count() << " edges " << o.edge_count() << " diameter "
            << diameter(o) << " max_degree " << max_degree << " -> " << path.string() << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  init_logging();
  CLI::App app{"hormone-based multimedia delivery simulator"};
  app.require_subcommand(1);

  Common run_c, sweep_c, opt_c, topo_c;
  auto* run = app.add_subcommand("run", "run one scenario");
  add_common(run, run_c);

  auto* sweep = app.add_subcommand("sweep", "run a replication x cleanup x churn x seed matrix");
  add_common(sweep, sweep_c);
  std::string replication = "all", cleanup = "lru,lfu,hormone", churn = "0", seeds = "1";
  sweep->add_option("--replication", replication, "comma list or 'all'");
  sweep->add_option("--cleanup", cleanup, "comma list of none,lru,lfu,hormone");
  sweep->add_option("--churn", churn, "comma list of removed-node counts");
  sweep->add_option("--seeds", seeds, "comma list of seeds");

  auto* opt = app.add_subcommand("optimize", "tune the hormone parameters with the GA");
  add_common(opt, opt_c);
  opt_c.preset = "tiny10";
  GaConfig ga;
  opt->add_option("--generations", ga.generations);
  opt->add_option("--population", ga.population_size);
  opt->add_option("--elites", ga.elite_count);
  opt->add_option("--mutants", ga.mutant_count);
  opt->add_option("--crossovers", ga.crossover_count);
  opt->add_option("--fresh", ga.fresh_count);
  opt->add_option("--sigma", ga.mutation_sigma, "mutation sigma, fraction of gene range");
  opt->add_option("--seeds-per-eval", ga.seeds_per_eval);

  auto* topo = app.add_subcommand("topo", "generate and export the overlay");
  add_common(topo, topo_c);
  int calibrate = 0;
  int calibrate_seeds = 20;
  topo->add_option("--calibrate-diameter", calibrate,
                   "pick edge_probability so the median diameter hits this value");
  topo->add_option("--calibrate-seeds", calibrate_seeds);

  CLI11_PARSE(app, argc, argv);
  try {
    if (*run) return cmd_run(run_c);
    if (*sweep) return cmd_sweep(sweep_c, replication, cleanup, churn, seeds);
    if (*opt) return cmd_optimize(opt_c, ga);
    if (*topo) return cmd_topo(topo_c, calibrate, calibrate_seeds);
  } catch (const std::exception& e) {
    std::cerr << "hsim: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
