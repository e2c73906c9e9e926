#pragma once

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "hsim/content.hpp"
#include "hsim/types.hpp"

namespace hsim {

struct Replica {
  UnitId unit = 0;
  NodeId node = kNoNode;
  Step created_at = 0;
  Step last_used_at = 0;
  std::uint32_t use_count = 0;
  bool in_delivery = false;
  int hop_index = 0;
  std::uint64_t journey_id = 0;
};

// Stored instances of units, per node. Enforces one replica per (node, unit)
// and the per-node capacity, and integrates each unit's replica count over
// time for the utilization metric.
class ReplicaStore {
 public:
  ReplicaStore() = default;
  ReplicaStore(const Catalog& catalog, std::size_t nodes, Bytes capacity);

  std::size_t node_count() const { return by_node_.size(); }
  Bytes capacity() const { return capacity_; }
  Bytes stored_bytes(NodeId node) const { return stored_.at(node); }
  double fill_ratio(NodeId node) const {
    return static_cast<double>(stored_.at(node)) / static_cast<double>(capacity_);
  }
  bool fits(NodeId node, Bytes size) const { return stored_.at(node) + size <= capacity_; }

  bool holds(NodeId node, UnitId unit) const {
    return present_[static_cast<std::size_t>(node) * units_ + unit] != 0;
  }
  bool holds_keyword(NodeId node, KeywordId keyword) const {
    return keyword_count_[static_cast<std::size_t>(node) * keywords_ + keyword] > 0;
  }
  const Replica* find(NodeId node, UnitId unit) const;
  Replica* find(NodeId node, UnitId unit);
  // Replicas on a node, ascending unit id. Invalidated by add/remove.
  std::span<const Replica> at(NodeId node) const { return by_node_.at(node); }
  // (keyword, unit) for every keyword of every replica on the node, ascending.
  std::span<const std::pair<KeywordId, UnitId>> keyword_index(NodeId node) const {
    return keyword_index_.at(node);
  }

  // Throws if the node already holds the unit or it would exceed capacity.
  // The returned reference is valid until the node's next add/remove.
  Replica& add(NodeId node, UnitId unit, Step now);
  void remove(NodeId node, UnitId unit, Step now);
  // Drops everything stored on a node; returns the removed unit ids.
  std::vector<UnitId> clear_node(NodeId node, Step now);

  std::size_t replica_count(UnitId unit) const { return count_.at(unit); }
  std::size_t total_replicas() const { return total_; }
  // Sum over steps [0, now) of the unit's replica count.
  double replica_steps(UnitId unit, Step now) const;

 private:
  void account(UnitId unit, Step now, int delta);

  const Catalog* catalog_ = nullptr;
  Bytes capacity_ = 0;
  std::size_t keywords_ = 0;
  std::size_t units_ = 0;
  std::vector<std::vector<Replica>> by_node_;
  std::vector<std::vector<std::pair<KeywordId, UnitId>>> keyword_index_;
  std::vector<Bytes> stored_;
  std::vector<std::uint32_t> keyword_count_;
  std::vector<std::uint8_t> present_;  // node * units + unit
  std::vector<std::uint32_t> count_;
  std::vector<Step> last_change_;
  std::vector<double> integral_;
  std::size_t total_ = 0;
};

}  // namespace hsim
