#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <memory>
#include <string>
#include <vector>

#include "hsim/state.hpp"

namespace hsim {

enum class TopologyKind { random, powerlaw };

struct ChurnEvent {
  Step step = 0;
  NodeId node = 0;
  friend bool operator==(const ChurnEvent&, const ChurnEvent&) = default;
};

struct Scenario {
  std::string name = "custom";
  TopologyKind topology = TopologyKind::random;
  RandomOverlayOptions random;
  PowerLawOverlayOptions powerlaw;
  CatalogOptions catalog;
  StorageOptions storage;
  ParameterSet params;
  ReplicationStrategy replication = ReplicationStrategy::neighbor_hormone_rank;
  double rank_threshold = 0.30;
  CleanupPolicy cleanup = CleanupPolicy::hormone;
  RequestOptions requests;
  // Nodes to remove at evenly spaced steps, chosen from the seed.
  std::size_t churn_nodes = 0;
  // Explicit removals, applied in addition to churn_nodes.
  std::vector<ChurnEvent> churn_events;
  Step duration = 10000;
  double dt = 0.1;
  std::uint64_t seed = 1;
  std::size_t transit_buffer = 4;
  Step transit_timeout = 50;
  bool trace_transfers = false;
  bool trace_slots = false;
  bool trace_hormone = false;

  std::size_t node_count() const;
  double bandwidth_bps() const;
  void validate() const;
};

// Preset scenarios: a 10-node desk-scale set-up, the 50-node random overlay
// and the 1,000-node scale-free overlay.
Scenario scenario_tiny();
Scenario scenario_random50();
Scenario scenario_scalefree1000();

// n_remove distinct uniformly chosen nodes, removed at
// floor((i + 1) * duration / (n_remove + 1)).
std::vector<ChurnEvent> schedule_churn(std::size_t n_remove,
                                       std::size_t node_count, Step duration,
                                       std::uint64_t seed);

Overlay build_overlay(const Scenario& scenario);

// Builds the t = 0 state: overlay, catalog, one replica per unit.
std::unique_ptr<SimulationState> build_state(const Scenario& scenario);

// Removes a node with everything on it: replicas, hormones, the user's
// request and every transfer into or out of it.
void remove_node(SimulationState& state, NodeId node);

// Owns one run. Phases per step: churn, requests and expiry, hormone
// deposit and raise, diffusion, evaporation, move planning, transfers and
// arrivals, clean-up, metrics.
class Engine {
 public:
  explicit Engine(Scenario scenario);

  const Scenario& scenario() const { return scenario_; }
  SimulationState& state() { return *state_; }
  const SimulationState& state() const { return *state_; }
  const std::vector<ChurnEvent>& churn() const { return churn_; }

  void step();
  bool done() const { return state_->clock >= scenario_.duration; }
  // Runs the remaining steps and returns the finished log.
  MetricsLog run();

  void set_step_observer(std::function<void(const SimulationState&)> fn) {
    step_observer_ = std::move(fn);
  }
  void set_hormone_trace(std::ostream* out) { state_->hormone_trace = out; }

 private:
  void finalize();

  Scenario scenario_;
  std::unique_ptr<SimulationState> state_;
  std::vector<ChurnEvent> churn_;
  std::size_t next_churn_ = 0;
  std::function<void(const SimulationState&)> step_observer_;
};

MetricsLog run(const Scenario& scenario);

}  // namespace hsim
