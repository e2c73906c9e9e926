#include "hsim/report.hpp"

#include <fstream>
#include <ostream>

#include <json.hpp>
#include <spdlog/spdlog.h>

#include "hsim/scenario_io.hpp"

namespace hsim {

namespace {

using Json = nlohmann::ordered_json;

Json box_json(const BoxStats& b) {
  return Json{{"count", b.count},        {"min", b.min},
              {"whisker_low", b.whisker_low}, {"q1", b.q1},
              {"median", b.median},      {"q3", b.q3},
              {"whisker_high", b.whisker_high}, {"max", b.max},
              {"mean", b.mean},          {"outliers", b.outliers}};
}

std::ofstream open_out(const std::filesystem::path& p) {
  std::ofstream out(p, std::ios::binary);
  if (!out) throw Error("cannot write '" + p.string() + "'");
  return out;
}

}  // namespace

void write_delays_csv(std::ostream& out, const MetricsLog& log) {
  out << "step,delay_s,missed\n";
  for (const DelaySample& d : log.delays) {
    out << d.step << ',' << format_double(steps_to_seconds(d.delay_steps, log.dt))
        << ',' << (d.missed ? 1 : 0) << '\n';
  }
}

void write_cdf_csv(std::ostream& out, const MetricsLog& log) {
  out << "delay_s,fraction\n";
  if (log.delays.empty()) return;
  for (const CdfPoint& p : delay_cdf(log)) {
    out << format_double(p.delay_s) << ',' << format_double(p.fraction) << '\n';
  }
}

void write_cleanup_csv(std::ostream& out, const MetricsLog& log, CleanupPolicy policy) {
  out << "step,node,policy,deleted_count,bytes_freed,failed\n";
  for (const CleanupReport& r : log.cleanups) {
    out << r.step << ',' << r.node << ',' << to_string(policy) << ',' << r.deleted.size()
        << ',' << r.bytes_freed << ',' << (r.failed ? 1 : 0) << '\n';
  }
}

void write_transfers_csv(std::ostream& out, const MetricsLog& log) {
  out << "journey_id,unit,from,to,start_step,end_step,hop_index\n";
  for (const TransferTrace& t : log.transfers) {
    out << t.journey_id << ',' << t.unit << ',' << t.from << ',' << t.to << ','
        << t.start_step << ',' << t.end_step << ',' << t.hop_index << '\n';
  }
}

void write_slots_csv(std::ostream& out, const MetricsLog& log) {
  out << "user,keyword,issued_at,terminal_status,delay_steps\n";
  for (const SlotEvent& e : log.slot_events) {
    out << e.user << ',' << e.keyword << ',' << e.issued_at << ','
        << (e.missed ? "missed" : "fulfilled") << ',' << e.delay_steps << '\n';
  }
}

std::string summary_json(const Scenario& scenario, const MetricsLog& log,
                         const Overrides& overrides) {
  Json j;
  Json settings = Json::object();
  for (const auto& [k, v] : scenario_settings(scenario)) settings[k] = v;
  j["scenario"] = settings;
  Json ov = Json::array();
  for (const auto& [k, v] : overrides) ov.push_back(Json{{"key", k}, {"value", v}});
  j["overrides"] = ov;

  j["steps"] = log.steps;
  j["dt"] = log.dt;
  j["requests_issued"] = log.requests_issued;
  j["slots_fulfilled"] = log.slots_fulfilled;
  j["slots_missed"] = log.slots_missed;
  if (log.slots_fulfilled + log.slots_missed > 0) {
    const FailureRates fr = failure_rates(log);
    j["deadline_missed_rate"] = fr.deadline_missed_rate;
    j["request_failed_rate"] = box_json(fr.request_failed_rate);
  } else {
    j["deadline_missed_rate"] = nullptr;
    j["request_failed_rate"] = nullptr;
  }
  j["utilization"] = box_json(utilization(log));
  j["delay_mean_s"] = mean_delay_s(log);
  j["delay_median_s"] = median_delay_s(log);
  j["cleanup_runs"] = log.cleanups.size();
  j["cleanup_failures"] = cleanup_failures(log);
  j["quartile_method"] = kQuartileMethod;
  j["transport"] = Json{{"started", log.transport.started},
                        {"committed", log.transport.committed},
                        {"retained", log.transport.retained},
                        {"duplicates", log.transport.duplicates},
                        {"parked", log.transport.parked},
                        {"dropped", log.transport.dropped},
                        {"failed", log.transport.failed}};
  j["nodes_removed"] = log.nodes_removed;
  j["units_lost"] = log.units_lost;
  return j.dump(2) + "\n";
}

void write_run_outputs(const std::filesystem::path& dir, const Scenario& scenario,
                       const MetricsLog& log, const Overrides& overrides) {
  std::filesystem::create_directories(dir);
  {
    auto out = open_out(dir / "delays.csv");
    write_delays_csv(out, log);
  }
  {
    auto out = open_out(dir / "cdf.csv");
    write_cdf_csv(out, log);
  }
  {
    auto out = open_out(dir / "cleanup.csv");
    write_cleanup_csv(out, log, scenario.cleanup);
  }
  {
    auto out = open_out(dir / "summary.json");
    out << summary_json(scenario, log, overrides);
  }
  if (scenario.trace_transfers) {
    auto out = open_out(dir / "transfers.csv");
    write_transfers_csv(out, log);
  }
  if (scenario.trace_slots) {
    auto out = open_out(dir / "slots.csv");
    write_slots_csv(out, log);
  }
}

MetricsLog run_to_directory(const Scenario& scenario, const std::filesystem::path& dir,
                            const Overrides& overrides) {
  std::filesystem::create_directories(dir);
  Engine engine(scenario);
  std::ofstream hormone;
  if (scenario.trace_hormone) {
    hormone = open_out(dir / "hormone.csv");
    hormone << "step,node,keyword,level\n";
    engine.set_hormone_trace(&hormone);
  }
  spdlog::info("running '{}' seed {} for {} steps", scenario.name, scenario.seed,
               scenario.duration);
  MetricsLog log = engine.run();
  write_run_outputs(dir, scenario, log, overrides);
  return log;
}

}  // namespace hsim
