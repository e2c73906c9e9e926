#include "hsim/cleanup.hpp"

#include <algorithm>
#include <array>
#include <string>
#include <tuple>

#include "hsim/state.hpp"

namespace hsim {

namespace {

constexpr std::array<std::string_view, 4> kPolicyNames{"none", "lru", "lfu", "hormone"};

bool neighbours_silent(const SimulationState& state, NodeId node,
                       const std::vector<KeywordId>& keywords) {
  for (const Link& l : state.overlay.links(node)) {
    if (!state.overlay.alive(l.to)) continue;
    for (KeywordId k : keywords) {
      if (state.hormones.level(l.to, k) > 0.0) return false;
    }
  }
  return true;
}

}  // namespace

std::string_view to_string(CleanupPolicy p) {
  return kPolicyNames.at(static_cast<std::size_t>(p));
}

CleanupPolicy parse_cleanup(std::string_view name) {
  for (std::size_t i = 0; i < kPolicyNames.size(); ++i) {
    if (kPolicyNames[i] == name) return static_cast<CleanupPolicy>(i);
  }
  throw Error("unknown clean-up policy '" + std::string(name) + "'");
}

namespace {

bool copy_nearby(const SimulationState& state, NodeId node, UnitId unit) {
  for (const Link& l : state.overlay.links(node)) {
    if (state.overlay.alive(l.to) && state.store.holds(l.to, unit)) return true;
  }
  return false;
}

}  // namespace

bool eligible(const SimulationState& state, NodeId node, UnitId unit) {
  const Replica* rep = state.store.find(node, unit);
  return rep != nullptr && !rep->in_delivery && copy_nearby(state, node, unit);
}

std::vector<UnitId> cleanup_order(const SimulationState& state, NodeId node,
                                  CleanupPolicy policy) {
  std::vector<const Replica*> candidates;
  std::vector<double> hormone_sum;
  for (const Replica& rep : state.store.at(node)) {
    const UnitId unit = rep.unit;
    if (rep.in_delivery || !copy_nearby(state, node, unit)) continue;
    if (policy == CleanupPolicy::hormone &&
        !neighbours_silent(state, node, state.catalog.unit(unit).keywords)) {
      continue;
    }
    candidates.push_back(&rep);
  }

  std::vector<std::size_t> idx(candidates.size());
  for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
  switch (policy) {
    case CleanupPolicy::none:
      return {};
    case CleanupPolicy::lru:
      std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
        const Replica* x = candidates[a];
        const Replica* y = candidates[b];
        return std::tie(x->last_used_at, x->unit) < std::tie(y->last_used_at, y->unit);
      });
      break;
    case CleanupPolicy::lfu:
      std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
        const Replica* x = candidates[a];
        const Replica* y = candidates[b];
        return std::tie(x->use_count, x->last_used_at, x->unit) <
               std::tie(y->use_count, y->last_used_at, y->unit);
      });
      break;
    case CleanupPolicy::hormone: {
      hormone_sum.resize(candidates.size());
      for (std::size_t i = 0; i < candidates.size(); ++i) {
        double sum = 0.0;
        for (KeywordId k : state.catalog.unit(candidates[i]->unit).keywords) {
          sum += state.hormones.level(node, k);
        }
        hormone_sum[i] = sum;
      }
      std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
        return std::tie(hormone_sum[a], candidates[a]->unit) <
               std::tie(hormone_sum[b], candidates[b]->unit);
      });
      break;
    }
  }
  std::vector<UnitId> out;
  out.reserve(idx.size());
  for (std::size_t i : idx) out.push_back(candidates[i]->unit);
  return out;
}

CleanupReport run_cleanup(SimulationState& state, NodeId node,
                          CleanupPolicy policy, double c) {
  CleanupReport report;
  report.node = node;
  report.step = state.clock;
  report.fill_before = state.store.fill_ratio(node);
  report.fill_after = report.fill_before;
  if (policy == CleanupPolicy::none || !(report.fill_before > c)) return report;

  for (UnitId unit : cleanup_order(state, node, policy)) {
    if (!(state.store.fill_ratio(node) > c)) break;
    if (!eligible(state, node, unit)) continue;
    if (policy == CleanupPolicy::hormone &&
        !neighbours_silent(state, node, state.catalog.unit(unit).keywords)) {
      continue;
    }
    if (state.on_delete) state.on_delete(state, node, unit);
    const Bytes size = state.catalog.unit(unit).size;
    state.store.remove(node, unit, state.clock);
    report.deleted.push_back(unit);
    report.bytes_freed += size;
  }
  report.fill_after = state.store.fill_ratio(node);
  report.failed = report.fill_after > c;
  return report;
}

}  // namespace hsim
