#include "hsim/replica_store.hpp"

#include <algorithm>
#include <string>

namespace hsim {

ReplicaStore::ReplicaStore(const Catalog& catalog, std::size_t nodes,
                           Bytes capacity)
    : catalog_(&catalog),
      capacity_(capacity),
      keywords_(catalog.keyword_count()),
      units_(catalog.unit_count()),
      by_node_(nodes),
      keyword_index_(nodes),
      stored_(nodes, 0),
      keyword_count_(nodes * catalog.keyword_count(), 0),
      present_(nodes * catalog.unit_count(), 0),
      count_(catalog.unit_count(), 0),
      last_change_(catalog.unit_count(), 0),
      integral_(catalog.unit_count(), 0.0) {
  if (capacity == 0) throw Error("replica store: capacity must be > 0");
}

namespace {

template <typename Vec>
auto lower(Vec& v, UnitId unit) {
  return std::lower_bound(v.begin(), v.end(), unit,
                          [](const Replica& r, UnitId u) { return r.unit < u; });
}

}  // namespace

const Replica* ReplicaStore::find(NodeId node, UnitId unit) const {
  if (!holds(node, unit)) return nullptr;
  return &*lower(by_node_[node], unit);
}

Replica* ReplicaStore::find(NodeId node, UnitId unit) {
  if (!holds(node, unit)) return nullptr;
  return &*lower(by_node_[node], unit);
}

void ReplicaStore::account(UnitId unit, Step now, int delta) {
  integral_[unit] += static_cast<double>(count_[unit]) *
                     static_cast<double>(now - last_change_[unit]);
  last_change_[unit] = now;
  count_[unit] = static_cast<std::uint32_t>(static_cast<int>(count_[unit]) + delta);
  total_ = static_cast<std::size_t>(static_cast<long long>(total_) + delta);
}

Replica& ReplicaStore::add(NodeId node, UnitId unit, Step now) {
  const Unit& u = catalog_->unit(unit);
  auto& m = by_node_.at(node);
  if (holds(node, unit)) {
    throw Error("replica store: node " + std::to_string(node) +
                " already holds unit " + std::to_string(unit));
  }
  if (!fits(node, u.size)) {
    throw Error("replica store: node " + std::to_string(node) + " is full");
  }
  Replica r;
  r.unit = unit;
  r.node = node;
  r.created_at = now;
  r.last_used_at = now;
  auto it = m.insert(lower(m, unit), r);
  stored_[node] += u.size;
  present_[static_cast<std::size_t>(node) * units_ + unit] = 1;
  auto& index = keyword_index_[node];
  for (KeywordId k : u.keywords) {
    ++keyword_count_[node * keywords_ + k];
    const std::pair<KeywordId, UnitId> e{k, unit};
    index.insert(std::lower_bound(index.begin(), index.end(), e), e);
  }
  account(unit, now, +1);
  return *it;
}

void ReplicaStore::remove(NodeId node, UnitId unit, Step now) {
  auto& m = by_node_.at(node);
  if (!holds(node, unit)) {
    throw Error("replica store: node " + std::to_string(node) +
                " does not hold unit " + std::to_string(unit));
  }
  m.erase(lower(m, unit));
  const Unit& u = catalog_->unit(unit);
  stored_[node] -= u.size;
  present_[static_cast<std::size_t>(node) * units_ + unit] = 0;
  auto& index = keyword_index_[node];
  for (KeywordId k : u.keywords) {
    --keyword_count_[node * keywords_ + k];
    index.erase(std::lower_bound(index.begin(), index.end(), std::pair{k, unit}));
  }
  account(unit, now, -1);
}

std::vector<UnitId> ReplicaStore::clear_node(NodeId node, Step now) {
  std::vector<UnitId> removed;
  for (const Replica& r : by_node_.at(node)) removed.push_back(r.unit);
  for (UnitId unit : removed) remove(node, unit, now);
  return removed;
}

double ReplicaStore::replica_steps(UnitId unit, Step now) const {
  return integral_.at(unit) + static_cast<double>(count_[unit]) *
                                  static_cast<double>(now - last_change_[unit]);
}

}  // namespace hsim
