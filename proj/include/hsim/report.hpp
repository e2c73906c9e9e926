#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "hsim/engine.hpp"

namespace hsim {

void write_delays_csv(std::ostream& out, const MetricsLog& log);
void write_cdf_csv(std::ostream& out, const MetricsLog& log);
void write_cleanup_csv(std::ostream& out, const MetricsLog& log, CleanupPolicy policy);
void write_transfers_csv(std::ostream& out, const MetricsLog& log);
void write_slots_csv(std::ostream& out, const MetricsLog& log);

using Overrides = std::vector<std::pair<std::string, std::string>>;

// Structured run summary: scenario settings, overrides, the evaluation
// statistics and transport counters.
std::string summary_json(const Scenario& scenario, const MetricsLog& log,
                         const Overrides& overrides);

// Writes delays.csv, cdf.csv, cleanup.csv, summary.json and, when the
// scenario enables them, transfers.csv and slots.csv into dir.
void write_run_outputs(const std::filesystem::path& dir, const Scenario& scenario,
                       const MetricsLog& log, const Overrides& overrides);

// Runs the scenario, streaming hormone.csv into dir when trace_hormone is
// set, and writes the outputs above.
MetricsLog run_to_directory(const Scenario& scenario, const std::filesystem::path& dir,
                            const Overrides& overrides);

}  // namespace hsim
