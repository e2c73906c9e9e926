#include "hsim/engine.hpp"

#include <algorithm>
#include <numeric>
#include <ostream>

#include <spdlog/spdlog.h>

namespace hsim {

namespace {
constexpr std::uint64_t kCatalogAttempts = 16;
}  // namespace

std::size_t Scenario::node_count() const {
  return topology == TopologyKind::random ? random.nodes : powerlaw.nodes;
}

double Scenario::bandwidth_bps() const {
  return topology == TopologyKind::random ? random.bandwidth_bps
                                          : powerlaw.bandwidth_bps;
}

void Scenario::validate() const {
  params.validate();
  if (node_count() < 2) throw Error("scenario: need at least 2 nodes");
  if (duration < 1) throw Error("scenario: duration must be >= 1");
  if (!(dt > 0.0)) throw Error("scenario: dt must be > 0");
  if (!(bandwidth_bps() > 0.0)) throw Error("scenario: bandwidth must be > 0");
  if (!(rank_threshold > 0.0 && rank_threshold <= 1.0)) {
    throw Error("scenario: rank_threshold must be in (0, 1]");
  }
  if (churn_nodes >= node_count()) {
    throw Error("scenario: churn_nodes must be below the node count");
  }
  for (const ChurnEvent& e : churn_events) {
    if (e.step < 0 || e.step >= duration) {
      throw Error("scenario: churn step outside [0, duration)");
    }
    if (e.node >= node_count()) throw Error("scenario: churn node out of range");
  }
  if (requests.max_keywords_per_request < 1) {
    throw Error("scenario: max_keywords_per_request must be >= 1");
  }
  if (!(requests.taste_prob >= 0.0 && requests.taste_prob <= 1.0)) {
    throw Error("scenario: taste_prob must be in [0, 1]");
  }
  if (transit_buffer < 1) throw Error("scenario: transit_buffer must be >= 1");
}

Scenario scenario_tiny() {
  Scenario s;
  s.name = "tiny10";
  s.topology = TopologyKind::random;
  s.random.nodes = 10;
  s.random.edge_probability = 0.3;
  s.catalog.units = 800;
  s.catalog.keywords = 160;
  s.duration = 1000;
  return s;
}

Scenario scenario_random50() {
  Scenario s;
  s.name = "random50";
  s.topology = TopologyKind::random;
  s.random.nodes = 50;
  s.random.edge_probability = 0.08;
  s.catalog.units = 5000;
  s.catalog.keywords = 1000;
  s.storage.contribution = Contribution::uniform;
  return s;
}

Scenario scenario_scalefree1000() {
  Scenario s;
  s.name = "scalefree1000";
  s.topology = TopologyKind::powerlaw;
  s.powerlaw.nodes = 1000;
  s.powerlaw.target_edges = 1600;
  s.powerlaw.rewire_steps = 16000;
  s.catalog.units = 15000;
  s.catalog.keywords = 3000;
  s.storage.contribution = Contribution::powerlaw;
  return s;
}

std::vector<ChurnEvent> schedule_churn(std::size_t n_remove,
                                       std::size_t node_count, Step duration,
                                       std::uint64_t seed) {
  if (n_remove >= node_count) {
    throw Error("churn: cannot remove " + std::to_string(n_remove) + " of " +
                std::to_string(node_count) + " nodes");
  }
  std::vector<ChurnEvent> out;
  if (n_remove == 0) return out;
  Rng rng = Rng::substream(seed, "churn");
  std::vector<NodeId> nodes(node_count);
  std::iota(nodes.begin(), nodes.end(), 0);
  rng.shuffle(nodes);
  for (std::size_t i = 0; i < n_remove; ++i) {
    const Step step = static_cast<Step>((i + 1) * static_cast<std::uint64_t>(duration) /
                                        (n_remove + 1));
    out.push_back(ChurnEvent{step, nodes[i]});
  }
  return out;
}

Overlay build_overlay(const Scenario& s) {
  if (s.topology == TopologyKind::random) return generate_random_overlay(s.random, s.seed);
  return generate_power_law_overlay(s.powerlaw, s.seed);
}

std::unique_ptr<SimulationState> build_state(const Scenario& s) {
  s.validate();
  SimulationConfig cfg;
  cfg.params = s.params;
  cfg.replication = s.replication;
  cfg.rank_threshold = s.rank_threshold;
  cfg.cleanup = s.cleanup;
  cfg.requests = s.requests;
  cfg.dt = s.dt;
  cfg.bandwidth_bps = s.bandwidth_bps();
  cfg.capacity = s.storage.capacity;
  cfg.transit_buffer = s.transit_buffer;
  cfg.transit_timeout = s.transit_timeout;
  cfg.trace_transfers = s.trace_transfers;
  cfg.trace_slots = s.trace_slots;

  Overlay overlay = build_overlay(s);
  // A catalog whose volume does not fit the seeding budget is redrawn from a
  // derived seed, a bounded number of times.
  Catalog catalog;
  Placement placement;
  for (std::uint64_t attempt = 0;; ++attempt) {
    const std::uint64_t catalog_seed =
        attempt == 0 ? s.seed : Rng::substream(s.seed, "catalog.redraw", attempt).next();
    catalog = generate_catalog(s.catalog, catalog_seed);
    try {
      placement = seed_initial_storage(overlay, catalog, s.storage, s.seed);
      break;
    } catch (const Error&) {
      if (attempt + 1 >= kCatalogAttempts) throw;
    }
  }
  catalog.assign_origins(placement.origin);

  auto state = std::make_unique<SimulationState>(cfg, std::move(overlay),
                                                 std::move(catalog), s.seed);
  for (const Unit& u : state->catalog.units()) state->store.add(u.origin_node, u.id, 0);
  return state;
}

void remove_node(SimulationState& state, NodeId node) {
  state.overlay.remove_node(node);
  for (const Transfer& t : state.transfers.cancel_node(node)) {
    if (t.from != node) {
      if (Replica* rep = state.store.find(t.from, t.unit)) rep->in_delivery = false;
    }
    ++state.metrics.transport.dropped;
  }
  state.store.clear_node(node, state.clock);
  state.hormones.clear_node(node);
  state.requests.drop(node);
  ++state.metrics.nodes_removed;
}

Engine::Engine(Scenario scenario)
    : scenario_(std::move(scenario)), state_(build_state(scenario_)) {
  churn_ = schedule_churn(scenario_.churn_nodes, scenario_.node_count(),
                          scenario_.duration, scenario_.seed);
  churn_.insert(churn_.end(), scenario_.churn_events.begin(),
                scenario_.churn_events.end());
  std::stable_sort(churn_.begin(), churn_.end(),
                   [](const ChurnEvent& a, const ChurnEvent& b) { return a.step < b.step; });
}

void Engine::step() {
  SimulationState& s = *state_;
  const Step now = s.clock;
  const ParameterSet& p = s.config.params;

  // 1. churn
  while (next_churn_ < churn_.size() && churn_[next_churn_].step <= now) {
    const NodeId node = churn_[next_churn_++].node;
    if (s.overlay.alive(node)) {
      spdlog::debug("step {}: removing node {}", now, node);
      remove_node(s, node);
    }
  }

  // 2. requests, then deadline expiry
  const auto fresh = issue_requests(s, now);
  expire_slots(s, now);

  // 3. hormone creation and raise
  for (const HormoneSlot& slot : fresh) {
    const Request* r = s.requests.current(slot.node);
    if (r != nullptr && !r->terminal()) s.hormones.deposit(s.overlay, slot.node, slot.keyword, p.eta0);
  }
  const auto open = open_slots(s, now);
  s.hormones.raise_open_requests(s.overlay, open, p.eta);

  // 4-5. diffusion and evaporation
  s.hormones.diffuse(s.overlay, p.alpha,
                     [&s](NodeId node, KeywordId k) { return s.residence(node, k); });
  s.hormones.evaporate(p.epsilon, p.t);
  if (s.hormone_trace != nullptr) s.hormones.dump_csv(*s.hormone_trace, now);

  // 6. movement
  start_transfers(s, plan_moves(s));

  // 7. transfers and arrivals
  for (const Transfer& t : step_transfers(s, s.config.dt)) {
    const auto outcome = on_arrival(s, t, s.config.replication);
    if (outcome == ArrivalOutcome::failed) {
      spdlog::debug("step {}: transfer of unit {} into {} failed, transit buffer full",
                    now, t.unit, t.to);
    }
  }

  // 8. clean-up, then parked arrivals get another chance
  if (s.config.cleanup != CleanupPolicy::none) {
    for (NodeId v = 0; v < s.overlay.node_count(); ++v) {
      if (!s.overlay.alive(v)) continue;
      if (!(s.store.fill_ratio(v) > p.c)) continue;
      s.metrics.cleanups.push_back(run_cleanup(s, v, s.config.cleanup, p.c));
    }
  }
  retry_parked(s, now);

  // 9. metrics
  if (step_observer_) step_observer_(s);
  ++s.clock;
}

void Engine::finalize() {
  SimulationState& s = *state_;
  s.metrics.steps = s.clock;
  const double steps = static_cast<double>(std::max<Step>(s.clock, 1));
  for (UnitId u = 0; u < s.catalog.unit_count(); ++u) {
    s.metrics.mean_replicas[u] = s.store.replica_steps(u, s.clock) / steps;
    if (s.store.replica_count(u) == 0) ++s.metrics.units_lost;
  }
}

MetricsLog Engine::run() {
  while (!done()) step();
  finalize();
  return state_->metrics;
}

MetricsLog run(const Scenario& scenario) {
  Engine engine(scenario);
  return engine.run();
}

}  // namespace hsim
