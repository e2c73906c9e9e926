#include <doctest.h>

#include <set>
#include <sstream>

#include "hsim/engine.hpp"
#include "hsim/report.hpp"
#include "support.hpp"

using namespace hsim;

namespace {

Scenario small(std::uint64_t seed = 1, Step duration = 300) {
  Scenario s = scenario_tiny();
  s.duration = duration;
  s.seed = seed;
  return s;
}

}  // namespace

TEST_CASE("churn schedule") {
  const auto twenty = schedule_churn(20, 50, 10000, 1);
  REQUIRE(twenty.size() == 20);
  std::set<NodeId> nodes;
  for (std::size_t i = 0; i < 20; ++i) {
    CHECK(twenty[i].step == static_cast<Step>((i + 1) * 10000 / 21));
    nodes.insert(twenty[i].node);
    CHECK(twenty[i].node < 50);
  }
  CHECK(nodes.size() == 20);

  CHECK(schedule_churn(0, 50, 10000, 1).empty());

  const auto many = schedule_churn(500, 1000, 10000, 2);
  std::set<NodeId> distinct;
  for (const auto& e : many) distinct.insert(e.node);
  CHECK(distinct.size() == 500);
  CHECK(many.front().step == 10000 / 501);

  CHECK_THROWS_AS(schedule_churn(50, 50, 100, 1), Error);
  CHECK(schedule_churn(5, 50, 100, 7) == schedule_churn(5, 50, 100, 7));
}

TEST_CASE("scenario validation") {
  Scenario s = small();
  CHECK_NOTHROW(s.validate());
  s.duration = 0;
  CHECK_THROWS_AS(s.validate(), Error);
  s = small();
  s.dt = 0.0;
  CHECK_THROWS_AS(s.validate(), Error);
  s = small();
  s.churn_events = {ChurnEvent{s.duration, 0}};
  CHECK_THROWS_AS(s.validate(), Error);
  s = small();
  s.rank_threshold = 0.0;
  CHECK_THROWS_AS(s.validate(), Error);
}

TEST_CASE("initial state holds one instance of every unit") {
  const auto state = build_state(small());
  CHECK(state->store.total_replicas() == state->catalog.unit_count());
  Bytes total = 0;
  for (NodeId v = 0; v < state->overlay.node_count(); ++v) {
    CHECK(state->store.fill_ratio(v) <= 0.30);
    total += state->store.stored_bytes(v);
  }
  CHECK(total == state->catalog.total_bytes());
}

TEST_CASE("an oversized catalog draw is redrawn until it fits") {
  // Seed 17 first draws a catalog 0.4% above the 30% budget of 50 nodes.
  Scenario s = scenario_random50();
  s.seed = 17;
  const auto state = build_state(s);
  CHECK(state->store.total_replicas() == 5000);
  for (NodeId v = 0; v < 50; ++v) CHECK(state->store.fill_ratio(v) <= 0.30);
  CHECK(build_state(s)->catalog.total_bytes() == state->catalog.total_bytes());
  s.storage.fill_fraction = 0.2;
  CHECK_THROWS_AS(build_state(s), Error);
}

TEST_CASE("a single step without attraction moves nothing") {
  Scenario s = small(1, 1);
  s.params.eta0 = 0.0;
  s.params.eta = 0.0;
  Engine e(s);
  std::vector<Bytes> before;
  for (NodeId v = 0; v < e.state().overlay.node_count(); ++v) {
    before.push_back(e.state().store.stored_bytes(v));
  }
  const MetricsLog log = e.run();
  CHECK(log.steps == 1);
  for (const auto& d : log.delays) CHECK(d.delay_steps == 0);
  for (NodeId v = 0; v < e.state().overlay.node_count(); ++v) {
    CHECK(e.state().store.stored_bytes(v) == before[v]);
  }
}

TEST_CASE("same seed, same outputs") {
  Scenario s = small(3);
  s.trace_transfers = s.trace_slots = true;
  const MetricsLog a = run(s);
  const MetricsLog b = run(s);
  CHECK(summary_json(s, a, {}) == summary_json(s, b, {}));
  std::ostringstream ta, tb, ca, cb;
  write_transfers_csv(ta, a);
  write_transfers_csv(tb, b);
  write_cdf_csv(ca, a);
  write_cdf_csv(cb, b);
  CHECK(ta.str() == tb.str());
  CHECK(ca.str() == cb.str());

  Scenario other = s;
  other.seed = 4;
  CHECK(summary_json(other, run(other), {}) != summary_json(s, a, {}));
}

TEST_CASE("per-step invariants over random small scenarios") {
  for (std::uint64_t seed = 1; seed <= 4; ++seed) {
    Scenario s = small(seed, 400);
    s.replication = kAllReplicationStrategies[seed % kAllReplicationStrategies.size()];
    s.cleanup = seed % 2 ? CleanupPolicy::lru : CleanupPolicy::hormone;
    s.churn_nodes = 2;
    Engine e(s);
    bool capacity_ok = true, dead_clean = true, hops_ok = true, slots_ok = true;
    e.set_step_observer([&](const SimulationState& st) {
      for (NodeId v = 0; v < st.overlay.node_count(); ++v) {
        capacity_ok &= st.store.stored_bytes(v) <= st.store.capacity();
        if (!st.overlay.alive(v)) {
          dead_clean &= st.store.at(v).empty();
          dead_clean &= st.hormones.node_levels(v).empty();
        }
        for (const Replica& r : st.store.at(v)) hops_ok &= r.hop_index <= st.config.params.maxhops;
      }
      st.transfers.for_each([&](const Transfer& t) {
        hops_ok &= t.hop_index < st.config.params.maxhops;
      });
      slots_ok &= st.metrics.delays.size() == st.metrics.slots_fulfilled + st.metrics.slots_missed;
    });
    const MetricsLog log = e.run();
    CHECK(capacity_ok);
    CHECK(dead_clean);
    CHECK(hops_ok);
    CHECK(slots_ok);
    CHECK(log.nodes_removed == 2);
  }
}

TEST_CASE("explicit churn events remove the listed node") {
  Scenario s = small(2, 50);
  s.churn_events = {ChurnEvent{10, 3}};
  Engine e(s);
  const MetricsLog log = e.run();
  CHECK_FALSE(e.state().overlay.alive(3));
  CHECK(e.state().store.at(3).empty());
  CHECK(log.nodes_removed == 1);
}

TEST_CASE("slot totals add up") {
  Scenario s = small(5, 500);
  s.trace_slots = true;
  Engine e(s);
  const MetricsLog log = e.run();
  const SimulationState& st = e.state();
  std::uint64_t issued = 0, open = 0;
  for (NodeId v = 0; v < st.overlay.node_count(); ++v) {
    for (KeywordId k = 0; k < st.catalog.keyword_count(); ++k) {
      issued += st.requests.request_count(v, k);
    }
    if (const Request* r = st.requests.current(v)) {
      for (const auto& slot : r->slots) open += slot.status == SlotStatus::open;
    }
  }
  CHECK(issued == log.slots_fulfilled + log.slots_missed + open);
  CHECK(log.slot_events.size() == log.slots_fulfilled + log.slots_missed);
  CHECK(log.delays.size() == log.slot_events.size());
  for (const auto& d : log.delays) CHECK(d.delay_steps >= 0);
}

TEST_CASE("Table 2 parameters deliver units on the tiny scenario") {
  const MetricsLog log = run(small(1, 500));
  CHECK(log.slots_fulfilled > 0);
  CHECK(log.transport.committed > 0);
  bool moved = false;
  for (const auto& d : log.delays) moved |= !d.missed && d.delay_steps > 0;
  CHECK(moved);
}
