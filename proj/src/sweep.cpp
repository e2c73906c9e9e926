#include "hsim/sweep.hpp"

#include <fstream>
#include <ostream>

#include <spdlog/spdlog.h>

#include "hsim/parallel.hpp"
#include "hsim/scenario_io.hpp"

namespace hsim {

std::vector<SweepCell> sweep_matrix(const SweepAxes& axes) {
  if (axes.replication.empty() || axes.cleanup.empty() || axes.churn.empty() ||
      axes.seeds.empty()) {
    throw Error("sweep: every axis needs at least one value");
  }
  std::vector<SweepCell> out;
  for (auto r : axes.replication) {
    for (auto c : axes.cleanup) {
      for (auto n : axes.churn) {
        for (auto s : axes.seeds) out.push_back(SweepCell{r, c, n, s});
      }
    }
  }
  return out;
}

std::string cell_name(const SweepCell& cell) {
  return std::string(to_string(cell.replication)) + "-" + std::string(to_string(cell.cleanup)) +
         "-churn" + std::to_string(cell.churn_nodes) + "-seed" + std::to_string(cell.seed);
}

Scenario cell_scenario(const Scenario& base, const SweepCell& cell) {
  Scenario s = base;
  s.replication = cell.replication;
  s.cleanup = cell.cleanup;
  s.churn_nodes = cell.churn_nodes;
  s.seed = cell.seed;
  return s;
}

std::vector<SweepRow> run_sweep(const Scenario& base, const std::vector<SweepCell>& cells,
                                const std::filesystem::path& out_dir, std::size_t jobs,
                                const Overrides& overrides) {
  std::vector<SweepRow> rows(cells.size());
  parallel_for(cells.size(), jobs, [&](std::size_t i) {
    SweepRow& row = rows[i];
    row.cell = cells[i];
    try {
      const Scenario s = cell_scenario(base, cells[i]);
      row.log = out_dir.empty() ? run(s) : run_to_directory(s, out_dir / cell_name(cells[i]), overrides);
      row.ok = true;
    } catch (const std::exception& e) {
      row.error = e.what();
      spdlog::error("sweep cell {} failed: {}", cell_name(cells[i]), e.what());
    }
  });
  if (!out_dir.empty()) {
    std::filesystem::create_directories(out_dir);
    std::ofstream out(out_dir / "sweep.csv", std::ios::binary);
    if (!out) throw Error("cannot write sweep.csv");
    write_sweep_csv(out, rows);
  }
  return rows;
}

void write_sweep_csv(std::ostream& out, const std::vector<SweepRow>& rows) {
  out << "replication,cleanup,churn,seed,slots_fulfilled,slots_missed,missed_rate,"
         "failed_rate_mean,failed_rate_median,delay_mean_s,delay_median_s,"
         "utilization_mean,utilization_median,cleanup_failures\n";
  for (const SweepRow& r : rows) {
    if (!r.ok) continue;
    const MetricsLog& log = r.log;
    double missed = 0.0;
    BoxStats failed;
    if (log.slots_fulfilled + log.slots_missed > 0) {
      const FailureRates fr = failure_rates(log);
      missed = fr.deadline_missed_rate;
      failed = fr.request_failed_rate;
    }
    const BoxStats util = utilization(log);
    out << to_string(r.cell.replication) << ',' << to_string(r.cell.cleanup) << ','
        << r.cell.churn_nodes << ',' << r.cell.seed << ',' << log.slots_fulfilled << ','
        << log.slots_missed << ',' << format_double(missed) << ','
        << format_double(failed.mean) << ',' << format_double(failed.median) << ','
        << format_double(mean_delay_s(log)) << ',' << format_double(median_delay_s(log)) << ','
        << format_double(util.mean) << ',' << format_double(util.median) << ','
        << cleanup_failures(log) << '\n';
  }
}

}  // namespace hsim
