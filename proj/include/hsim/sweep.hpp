#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "hsim/report.hpp"

namespace hsim {

struct SweepCell {
  ReplicationStrategy replication = ReplicationStrategy::path;
  CleanupPolicy cleanup = CleanupPolicy::lru;
  std::size_t churn_nodes = 0;
  std::uint64_t seed = 1;
};

struct SweepAxes {
  std::vector<ReplicationStrategy> replication;
  std::vector<CleanupPolicy> cleanup;
  std::vector<std::size_t> churn;
  std::vector<std::uint64_t> seeds;
};

// Cartesian product in replication, cleanup, churn, seed order. Throws if any
// axis is empty.
std::vector<SweepCell> sweep_matrix(const SweepAxes& axes);

// Subdirectory name of a cell, e.g. "path-lru-churn0-seed1".
std::string cell_name(const SweepCell& cell);

Scenario cell_scenario(const Scenario& base, const SweepCell& cell);

struct SweepRow {
  SweepCell cell;
  bool ok = false;
  std::string error;
  MetricsLog log;
};

// Runs every cell (shared-nothing, up to `jobs` at a time). With a non-empty
// out_dir each cell writes its outputs into out_dir / cell_name and the
// combined sweep.csv is written at the end. A failing cell is recorded and
// does not stop the others.
std::vector<SweepRow> run_sweep(const Scenario& base, const std::vector<SweepCell>& cells,
                                const std::filesystem::path& out_dir, std::size_t jobs,
                                const Overrides& overrides = {});

// One row per successful cell, keyed by (replication, cleanup, churn, seed).
void write_sweep_csv(std::ostream& out, const std::vector<SweepRow>& rows);

}  // namespace hsim
