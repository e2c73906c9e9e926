#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "hsim/report.hpp"
#include "hsim/scenario_io.hpp"
#include "hsim/sweep.hpp"

using namespace hsim;
namespace fs = std::filesystem;

namespace {

fs::path scratch_dir(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("hsim_test_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("scenario text round trip") {
  Scenario s = scenario_random50();
  s.replication = ReplicationStrategy::path_adaptive;
  s.cleanup = CleanupPolicy::lfu;
  s.params.alpha = 0.3;
  s.churn_events = {ChurnEvent{5, 2}, ChurnEvent{9, 4}};
  s.trace_slots = true;
  std::stringstream ss;
  write_scenario(ss, s);
  const Scenario back = read_scenario(ss);
  CHECK(scenario_settings(back) == scenario_settings(s));
  CHECK(back.params == s.params);
  CHECK(back.churn_events == s.churn_events);
}

TEST_CASE("scenario files: presets, comments and errors") {
  std::istringstream in("# comment\npreset = tiny10\n\nalpha = 0.5  # trailing\nseed=7\n");
  const Scenario s = read_scenario(in, "x.cfg");
  CHECK(s.name == "tiny10");
  CHECK(s.params.alpha == 0.5);
  CHECK(s.seed == 7);
  CHECK(s.node_count() == 10);

  std::istringstream bad_key("alpha = 0.5\nbogus = 1\n");
  try {
    read_scenario(bad_key, "x.cfg");
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(std::string(e.what()).find("x.cfg:2") != std::string::npos);
  }
  std::istringstream bad_value("alpha = lots\n");
  CHECK_THROWS_AS(read_scenario(bad_value), Error);
  std::istringstream no_eq("alpha\n");
  CHECK_THROWS_AS(read_scenario(no_eq), Error);
  CHECK_THROWS_AS(preset_scenario("huge"), Error);
}

TEST_CASE("overrides") {
  Scenario s = scenario_tiny();
  apply_override(s, "replication=path");
  apply_override(s, "cleanup = hormone");
  apply_override(s, "nodes=12");
  CHECK(s.replication == ReplicationStrategy::path);
  CHECK(s.cleanup == CleanupPolicy::hormone);
  CHECK(s.node_count() == 12);
  CHECK_THROWS_AS(apply_override(s, "replication"), Error);
}

TEST_CASE("shortest round-trip doubles") {
  CHECK(format_double(0.1) == "0.1");
  CHECK(format_double(5.3) == "5.3");
  CHECK(format_double(100e6) == "100000000");
}

TEST_CASE("run outputs") {
  Scenario s = scenario_tiny();
  s.duration = 200;
  s.trace_transfers = s.trace_slots = s.trace_hormone = true;
  const fs::path dir = scratch_dir("run");
  const Overrides ov{{"replication", "path"}};
  const MetricsLog log = run_to_directory(s, dir, ov);
  for (const char* f : {"delays.csv", "cdf.csv", "cleanup.csv", "summary.json", "transfers.csv",
                        "slots.csv", "hormone.csv"}) {
    CHECK(fs::exists(dir / f));
  }
  CHECK(slurp(dir / "delays.csv").rfind("step,delay_s,missed\n", 0) == 0);
  const std::string cdf = slurp(dir / "cdf.csv");
  CHECK(cdf.rfind("delay_s,fraction\n", 0) == 0);
  CHECK(cdf.substr(cdf.size() - 3) == ",1\n");
  CHECK(slurp(dir / "transfers.csv").rfind("journey_id,unit,from,to,start_step,end_step,hop_index\n", 0) == 0);
  CHECK(slurp(dir / "slots.csv").rfind("user,keyword,issued_at,terminal_status,delay_steps\n", 0) == 0);
  CHECK(slurp(dir / "hormone.csv").rfind("step,node,keyword,level\n", 0) == 0);

  const auto j = nlohmann::json::parse(slurp(dir / "summary.json"));
  CHECK(j["overrides"][0]["key"] == "replication");
  CHECK(j["overrides"][0]["value"] == "path");
  CHECK(j["slots_fulfilled"] == log.slots_fulfilled);
  CHECK(j["quartile_method"] == kQuartileMethod);
  CHECK(j["utilization"].contains("whisker_high"));
  CHECK(j["request_failed_rate"].contains("q3"));
  fs::remove_all(dir);
}

TEST_CASE("sweep matrix") {
  SweepAxes axes;
  axes.replication.assign(kAllReplicationStrategies.begin(), kAllReplicationStrategies.end());
  axes.cleanup = {CleanupPolicy::lru, CleanupPolicy::lfu, CleanupPolicy::hormone};
  axes.churn = {0};
  axes.seeds = {1};
  const auto cells = sweep_matrix(axes);
  CHECK(cells.size() == 21);
  CHECK(cell_name(cells[0]) == "owner-lru-churn0-seed1");
  axes.seeds.clear();
  CHECK_THROWS_AS(sweep_matrix(axes), Error);
}

TEST_CASE("sweep writes one directory and one row per cell") {
  Scenario base = scenario_tiny();
  base.duration = 100;
  SweepAxes axes;
  axes.replication = {ReplicationStrategy::path, ReplicationStrategy::owner};
  axes.cleanup = {CleanupPolicy::lru, CleanupPolicy::hormone};
  axes.churn = {0, 2};
  axes.seeds = {1};
  const auto cells = sweep_matrix(axes);
  const fs::path dir = scratch_dir("sweep");
  const auto rows = run_sweep(base, cells, dir, 2);
  REQUIRE(rows.size() == 8);
  for (const auto& r : rows) {
    CHECK(r.ok);
    CHECK(fs::exists(dir / cell_name(r.cell) / "summary.json"));
  }
  std::istringstream csv(slurp(dir / "sweep.csv"));
  std::string line;
  int lines = 0;
  while (std::getline(csv, line)) ++lines;
  CHECK(lines == 9);

  // Same cells again, serially: identical combined table.
  const fs::path again = scratch_dir("sweep2");
  run_sweep(base, cells, again, 1);
  CHECK(slurp(dir / "sweep.csv") == slurp(again / "sweep.csv"));
  fs::remove_all(dir);
  fs::remove_all(again);
}

TEST_CASE("failing sweep cells are recorded") {
  Scenario base = scenario_tiny();
  base.duration = 50;
  SweepAxes axes;
  axes.replication = {ReplicationStrategy::path};
  axes.cleanup = {CleanupPolicy::lru};
  axes.churn = {0, 10};  // removing every node is rejected
  axes.seeds = {1};
  const auto rows = run_sweep(base, sweep_matrix(axes), {}, 1);
  REQUIRE(rows.size() == 2);
  CHECK(rows[0].ok);
  CHECK_FALSE(rows[1].ok);
  CHECK_FALSE(rows[1].error.empty());
}
