#pragma once

#include <array>
#include <cstdint>
#include <deque>
#include <map>
#include <optional>
#include <set>
#include <unordered_set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "hsim/topology.hpp"
#include "hsim/types.hpp"

namespace hsim {

struct SimulationState;

enum class ReplicationStrategy {
  owner,
  path,
  path_adaptive,
  simple_hormone,
  local_popularity,
  neighbor_popularity_rank,
  neighbor_hormone_rank,
};

inline constexpr std::array<ReplicationStrategy, 7> kAllReplicationStrategies{
    ReplicationStrategy::owner,
    ReplicationStrategy::path,
    ReplicationStrategy::path_adaptive,
    ReplicationStrategy::simple_hormone,
    ReplicationStrategy::local_popularity,
    ReplicationStrategy::neighbor_popularity_rank,
    ReplicationStrategy::neighbor_hormone_rank,
};

std::string_view to_string(ReplicationStrategy s);
ReplicationStrategy parse_replication(std::string_view name);

// One hop of a unit over one directed link.
struct Transfer {
  std::uint64_t journey_id = 0;
  UnitId unit = 0;
  NodeId from = 0;
  NodeId to = 0;
  double bytes_remaining = 0.0;
  int hop_index = 0;  // hops already travelled by the moving replica
  Step start_step = 0;
  Step parked_at = -1;
};

// Per directed link FIFO queues (the head is the active transfer) and the
// per-node transit buffers holding arrivals that found their destination
// full.
class TransferBoard {
 public:
  void enqueue(Transfer t);

  // Advances every active transfer by bandwidth * dt / 8 bytes. Finished
  // transfers are returned in link order; the next queued transfer on a freed
  // link starts moving on the following call.
  std::vector<Transfer> step(const Overlay& overlay, double dt);

  bool inbound(NodeId to, UnitId unit) const { return inbound_.count(key(to, unit)) != 0; }
  std::size_t in_flight() const;
  std::size_t queued_on(NodeId from, NodeId to) const;

  bool park(Transfer t, std::size_t limit, Step now);
  std::deque<Transfer>& parked(NodeId node) { return parked_[node]; }
  std::size_t parked_count() const;
  void release(NodeId to, UnitId unit) { inbound_.erase(key(to, unit)); }

  // Removes every queued or active transfer touching the node and every
  // arrival parked at it. Arrivals parked elsewhere that came from the node
  // are kept, their data has already moved.
  std::vector<Transfer> cancel_node(NodeId node);

  template <typename Fn>
  void for_each(Fn&& fn) const {
    for (const auto& [link, q] : links_) {
      for (const Transfer& t : q) fn(t);
    }
    for (const auto& [node, q] : parked_) {
      for (const Transfer& t : q) fn(t);
    }
  }

 private:
  std::map<std::pair<NodeId, NodeId>, std::deque<Transfer>> links_;
  std::map<NodeId, std::deque<Transfer>> parked_;
  static std::uint64_t key(NodeId to, UnitId unit) {
    return (static_cast<std::uint64_t>(to) << 32) | unit;
  }
  std::unordered_set<std::uint64_t> inbound_;
};

// Mean of natural logs of the ranks. Throws on an empty list or a rank < 1.
double region_rank(std::span<const double> ranks);

// Moves for this step: for every idle replica the steepest positive gradient
// over its keywords and alive neighbours, emitted iff it exceeds m and the
// replica has hops left. Ties go to the lower keyword id, then the lower
// node id.
std::vector<Transfer> plan_moves(const SimulationState& state);

// Flags the source replicas in delivery and queues the transfers.
void start_transfers(SimulationState& state, std::vector<Transfer> transfers);

std::vector<Transfer> step_transfers(SimulationState& state, double dt);

enum class ArrivalOutcome { committed, duplicate, parked, failed, dropped };

// Commits an arrived transfer at its destination, fires request fulfilment,
// and lets the replication strategy decide whether the source keeps a copy.
ArrivalOutcome on_arrival(SimulationState& state, const Transfer& transfer,
                          ReplicationStrategy strategy);

// Whether the source of a finished hop keeps its copy.
bool retain_at_source(SimulationState& state, const Transfer& transfer,
                      ReplicationStrategy strategy);

// Region rank of the unit across the source's neighbours, with the threshold
// it is compared against; nullopt when no neighbour has a rank table.
struct RegionRankDecision {
  double rank = 0.0;
  double threshold = 0.0;
};
std::optional<RegionRankDecision> neighbor_region_rank(
    const SimulationState& state, NodeId node, UnitId unit,
    ReplicationStrategy strategy);

// Retries parked arrivals in FIFO order; expired ones fail.
void retry_parked(SimulationState& state, Step now);

}  // namespace hsim
