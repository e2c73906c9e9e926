#pragma once

#include <string_view>
#include <vector>

#include "hsim/metrics.hpp"
#include "hsim/types.hpp"

namespace hsim {

struct SimulationState;

// `none` disables the sweep and serves as the no-clean-up baseline.
enum class CleanupPolicy { none, lru, lfu, hormone };

std::string_view to_string(CleanupPolicy p);
CleanupPolicy parse_cleanup(std::string_view name);

// A stored replica may be deleted only if it is not in delivery and some
// alive neighbour holds a copy of the same unit.
bool eligible(const SimulationState& state, NodeId node, UnitId unit);

// Eligible replicas of a node in deletion order for the policy.
std::vector<UnitId> cleanup_order(const SimulationState& state, NodeId node,
                                  CleanupPolicy policy);

// Deletes replicas in policy order until the fill is at most c. Eligibility
// is re-checked before every deletion.
CleanupReport run_cleanup(SimulationState& state, NodeId node,
                          CleanupPolicy policy, double c);

}  // namespace hsim
