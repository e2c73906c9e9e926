#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>

#include "hsim/cleanup.hpp"
#include "hsim/content.hpp"
#include "hsim/hormone.hpp"
#include "hsim/metrics.hpp"
#include "hsim/replica_store.hpp"
#include "hsim/requests.hpp"
#include "hsim/rng.hpp"
#include "hsim/topology.hpp"
#include "hsim/transport.hpp"

namespace hsim {

// Knobs the per-phase operations read while a run is in progress.
struct SimulationConfig {
  ParameterSet params;
  ReplicationStrategy replication = ReplicationStrategy::neighbor_hormone_rank;
  double rank_threshold = 0.30;
  CleanupPolicy cleanup = CleanupPolicy::hormone;
  RequestOptions requests;
  double dt = 0.1;
  double bandwidth_bps = 100e6;  // nominal link rate, used for deadlines
  Bytes capacity = 900 * kMB;
  std::size_t transit_buffer = 4;
  Step transit_timeout = 50;
  bool trace_transfers = false;
  bool trace_slots = false;
};

// Everything one run owns. Not copyable or movable: the replica store keeps
// a pointer to the catalog.
struct SimulationState {
  SimulationState(SimulationConfig cfg, Overlay overlay_in, Catalog catalog_in,
                  std::uint64_t seed);
  SimulationState(const SimulationState&) = delete;
  SimulationState& operator=(const SimulationState&) = delete;

  SimulationConfig config;
  Overlay overlay;
  Catalog catalog;
  ReplicaStore store;
  HormoneField hormones;
  RequestBook requests;
  TransferBoard transfers;
  MetricsLog metrics;
  ZipfSampler popularity;
  Rng request_rng;
  Rng transport_rng;
  Step clock = 0;
  std::uint64_t next_journey = 1;

  // Called right before a clean-up deletion, with the replica still stored.
  std::function<void(const SimulationState&, NodeId, UnitId)> on_delete;
  // Optional hormone trace sink.
  std::ostream* hormone_trace = nullptr;

  bool residence(NodeId node, KeywordId keyword) const {
    return store.holds_keyword(node, keyword);
  }
};

}  // namespace hsim
