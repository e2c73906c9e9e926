#include "hsim/transport.hpp"

#include <algorithm>
#include <limits>
#include <cmath>
#include <set>
#include <unordered_set>

#include "hsim/state.hpp"

namespace hsim {

namespace {

constexpr std::array<std::string_view, 7> kReplicationNames{
    "owner",
    "path",
    "path_adaptive",
    "simple_hormone",
    "local_popularity",
    "neighbor_popularity_rank",
    "neighbor_hormone_rank",
};

}  // namespace

std::string_view to_string(ReplicationStrategy s) {
  return kReplicationNames.at(static_cast<std::size_t>(s));
}

ReplicationStrategy parse_replication(std::string_view name) {
  for (std::size_t i = 0; i < kReplicationNames.size(); ++i) {
    if (kReplicationNames[i] == name) return static_cast<ReplicationStrategy>(i);
  }
  throw Error("unknown replication strategy '" + std::string(name) + "'");
}

void TransferBoard::enqueue(Transfer t) {
  inbound_.insert(key(t.to, t.unit));
  links_[{t.from, t.to}].push_back(t);
}

std::vector<Transfer> TransferBoard::step(const Overlay& overlay, double dt) {
  std::vector<Transfer> arrived;
  for (auto it = links_.begin(); it != links_.end();) {
    auto& q = it->second;
    Transfer& head = q.front();
    head.bytes_remaining -= overlay.bandwidth(head.from, head.to) * dt / 8.0;
    if (head.bytes_remaining <= 0.0) {
      head.bytes_remaining = 0.0;
      arrived.push_back(head);
      q.pop_front();
    }
    it = q.empty() ? links_.erase(it) : std::next(it);
  }
  // The arrivals stay registered as inbound until committed or released.
  return arrived;
}

std::size_t TransferBoard::in_flight() const {
  std::size_t n = 0;
  for (const auto& [link, q] : links_) n += q.size();
  return n;
}

std::size_t TransferBoard::queued_on(NodeId from, NodeId to) const {
  auto it = links_.find({from, to});
  return it == links_.end() ? 0 : it->second.size();
}

bool TransferBoard::park(Transfer t, std::size_t limit, Step now) {
  auto& q = parked_[t.to];
  if (q.size() >= limit) return false;
  t.parked_at = now;
  q.push_back(t);
  return true;
}

std::size_t TransferBoard::parked_count() const {
  std::size_t n = 0;
  for (const auto& [node, q] : parked_) n += q.size();
  return n;
}

std::vector<Transfer> TransferBoard::cancel_node(NodeId node) {
  std::vector<Transfer> cancelled;
  for (auto it = links_.begin(); it != links_.end();) {
    if (it->first.first == node || it->first.second == node) {
      for (const Transfer& t : it->second) {
        inbound_.erase(key(t.to, t.unit));
        cancelled.push_back(t);
      }
      it = links_.erase(it);
    } else {
      ++it;
    }
  }
  if (auto it = parked_.find(node); it != parked_.end()) {
    for (const Transfer& t : it->second) {
      inbound_.erase(key(t.to, t.unit));
      cancelled.push_back(t);
    }
    parked_.erase(it);
  }
  return cancelled;
}

double region_rank(std::span<const double> ranks) {
  if (ranks.empty()) throw Error("region_rank: empty rank list");
  double sum = 0.0;
  for (double r : ranks) {
    if (!(r >= 1.0)) throw Error("region_rank: ranks must be >= 1");
    sum += std::log(r);
  }
  return sum / static_cast<double>(ranks.size());
}

std::vector<Transfer> plan_moves(const SimulationState& state) {
  const auto& p = state.config.params;
  const HormoneField& field = state.hormones;
  std::vector<Transfer> out;
  // (target, unit) pairs already chosen this step.
  std::unordered_set<std::uint64_t> claimed;
  auto claim_key = [](NodeId to, UnitId unit) {
    return (static_cast<std::uint64_t>(to) << 32) | unit;
  };

  // A replica can only move along keyword k if some neighbour holds more
  // than m of it, so first collect those keywords per node (CSR layout,
  // keywords ascending within a node).
  const std::size_t n = state.overlay.node_count();
  std::vector<std::size_t> near_start(n + 1, 0);
  std::vector<KeywordId> near_keywords;
  std::vector<KeywordId> last(n, std::numeric_limits<KeywordId>::max());
  auto each_attraction = [&](auto&& fn) {
    for (KeywordId k = 0; k < field.keyword_count(); ++k) {
      for (const auto& e : field.entries(k)) {
        if (!(e.level > p.m)) continue;
        state.overlay.for_each_alive_link(e.node, [&](const Link& l) {
          if (last[l.to] == k) return;
          last[l.to] = k;
          fn(l.to, k);
        });
      }
    }
  };
  each_attraction([&](NodeId v, KeywordId) { ++near_start[v + 1]; });
  for (std::size_t v = 0; v < n; ++v) near_start[v + 1] += near_start[v];
  near_keywords.resize(near_start[n]);
  std::vector<std::size_t> fill(near_start.begin(), near_start.end() - 1);
  std::fill(last.begin(), last.end(), std::numeric_limits<KeywordId>::max());
  each_attraction([&](NodeId v, KeywordId k) { near_keywords[fill[v]++] = k; });

  // Per node, the neighbours pulling each attracting keyword, in neighbour
  // order; pull_start[i] indexes the run belonging to near[i].
  struct Pull {
    double delta;
    NodeId to;
  };
  std::vector<Pull> pulls;
  std::vector<std::size_t> pull_start;
  std::vector<UnitId> candidates;
  for (NodeId v = 0; v < state.overlay.node_count(); ++v) {
    if (!state.overlay.alive(v) || near_start[v] == near_start[v + 1]) continue;
    const std::span<const KeywordId> near(near_keywords.data() + near_start[v],
                                          near_start[v + 1] - near_start[v]);
    pulls.clear();
    pull_start.assign(near.size() + 1, 0);
    candidates.clear();
    // Walk the attracting keywords and the node's (keyword, unit) index together.
    const auto index = state.store.keyword_index(v);
    auto cursor = index.begin();
    for (std::size_t i = 0; i < near.size(); ++i) {
      const KeywordId k = near[i];
      pull_start[i] = pulls.size();
      while (cursor != index.end() && cursor->first < k) ++cursor;
      if (cursor == index.end() || cursor->first != k) continue;
      const double own = field.level(v, k);
      state.overlay.for_each_alive_link(v, [&](const Link& l) {
        const double delta = field.level(l.to, k) - own;
        if (delta > p.m) pulls.push_back(Pull{delta, l.to});
      });
      if (pulls.size() == pull_start[i]) continue;
      for (auto e = cursor; e != index.end() && e->first == k; ++e) {
        candidates.push_back(e->second);
      }
    }
    pull_start[near.size()] = pulls.size();
    std::sort(candidates.begin(), candidates.end());
    candidates.erase(std::unique(candidates.begin(), candidates.end()), candidates.end());
    for (UnitId unit : candidates) {
      const Replica& rep = *state.store.find(v, unit);
      if (rep.in_delivery || rep.hop_index >= p.maxhops) continue;
      const Unit& u = state.catalog.unit(unit);
      double best = 0.0;
      NodeId best_node = kNoNode;
      for (KeywordId k : u.keywords) {
        auto it = std::lower_bound(near.begin(), near.end(), k);
        if (it == near.end() || *it != k) continue;
        const std::size_t i = static_cast<std::size_t>(it - near.begin());
        for (std::size_t j = pull_start[i]; j < pull_start[i + 1]; ++j) {
          const Pull& pull = pulls[j];
          if (best_node != kNoNode && !(pull.delta > best)) continue;
          if (state.store.holds(pull.to, unit) || state.transfers.inbound(pull.to, unit) ||
              claimed.count(claim_key(pull.to, unit))) {
            continue;
          }
          best = pull.delta;
          best_node = pull.to;
        }
      }
      if (best_node == kNoNode) continue;
      claimed.insert(claim_key(best_node, unit));
      Transfer t;
      t.journey_id = rep.journey_id;
      t.unit = unit;
      t.from = v;
      t.to = best_node;
      t.bytes_remaining = static_cast<double>(u.size);
      t.hop_index = rep.hop_index;
      t.start_step = state.clock;
      out.push_back(t);
    }
  }
  return out;
}

void start_transfers(SimulationState& state, std::vector<Transfer> transfers) {
  for (Transfer& t : transfers) {
    Replica* rep = state.store.find(t.from, t.unit);
    if (rep == nullptr || rep->in_delivery) {
      throw Error("transport: transfer source replica missing or busy");
    }
    if (rep->hop_index == 0 || rep->journey_id == 0) {
      rep->journey_id = state.next_journey++;
    }
    t.journey_id = rep->journey_id;
    rep->in_delivery = true;
    ++state.metrics.transport.started;
    state.transfers.enqueue(t);
  }
}

std::vector<Transfer> step_transfers(SimulationState& state, double dt) {
  if (!(dt > 0.0)) throw Error("transport: dt must be > 0");
  return state.transfers.step(state.overlay, dt);
}

namespace {

void release_source(SimulationState& state, const Transfer& t) {
  if (Replica* rep = state.store.find(t.from, t.unit)) rep->in_delivery = false;
}

// Rank of the unit in a table given as (keyword, score) pairs: the best rank
// over the unit's keywords, table_size + 1 when none of them is listed.
template <typename Score>
double best_rank(const std::vector<KeywordId>& unit_keywords, std::size_t table_size,
                 Score&& rank_of) {
  std::size_t best = table_size + 1;
  for (KeywordId k : unit_keywords) {
    const std::size_t r = rank_of(k);
    if (r != 0) best = std::min(best, r);
  }
  return static_cast<double>(best);
}

std::size_t hormone_rank(const std::vector<std::pair<KeywordId, double>>& levels,
                         KeywordId keyword) {
  auto it = std::lower_bound(levels.begin(), levels.end(), keyword,
                             [](const auto& e, KeywordId k) { return e.first < k; });
  if (it == levels.end() || it->first != keyword) return 0;
  const double mine = it->second;
  std::size_t better = 0;
  for (const auto& [k, level] : levels) {
    if (level > mine || (level == mine && k < keyword)) ++better;
  }
  return better + 1;
}

}  // namespace

std::optional<RegionRankDecision> neighbor_region_rank(
    const SimulationState& state, NodeId node, UnitId unit,
    ReplicationStrategy strategy) {
  const auto& kws = state.catalog.unit(unit).keywords;
  std::vector<double> ranks;
  double table_sum = 0.0;
  state.overlay.for_each_alive_link(node, [&](const Link& l) {
    if (strategy == ReplicationStrategy::neighbor_popularity_rank) {
      const std::size_t size = state.requests.history_size(l.to);
      if (size == 0) return;
      table_sum += static_cast<double>(size);
      ranks.push_back(best_rank(kws, size, [&](KeywordId k) {
        return state.requests.popularity_rank(l.to, k);
      }));
    } else {
      const auto& levels = state.hormones.node_levels(l.to);
      if (levels.empty()) return;
      table_sum += static_cast<double>(levels.size());
      ranks.push_back(best_rank(kws, levels.size(),
                                [&](KeywordId k) { return hormone_rank(levels, k); }));
    }
  });
  if (ranks.empty()) return std::nullopt;
  const double mean_size = table_sum / static_cast<double>(ranks.size());
  return RegionRankDecision{region_rank(ranks),
                            std::log(state.config.rank_threshold * mean_size)};
}

bool retain_at_source(SimulationState& state, const Transfer& t,
                      ReplicationStrategy strategy) {
  const NodeId src = t.from;
  const bool journey_origin = t.hop_index == 0;
  const auto& kws = state.catalog.unit(t.unit).keywords;
  switch (strategy) {
    case ReplicationStrategy::owner:
      return journey_origin;
    case ReplicationStrategy::path:
      return !journey_origin;
    case ReplicationStrategy::path_adaptive: {
      if (journey_origin) return false;
      const double keep = std::clamp(1.0 - state.store.fill_ratio(src), 0.0, 1.0);
      return state.transport_rng.uniform() < keep;
    }
    case ReplicationStrategy::simple_hormone: {
      int attracted = 0;
      state.overlay.for_each_alive_link(src, [&](const Link& l) {
        for (KeywordId k : kws) {
          if (state.hormones.level(l.to, k) > 0.0) {
            ++attracted;
            return;
          }
        }
      });
      return attracted >= 2;
    }
    case ReplicationStrategy::local_popularity: {
      const double size = static_cast<double>(state.requests.history_size(src));
      for (KeywordId k : kws) {
        const std::size_t r = state.requests.popularity_rank(src, k);
        if (r != 0 && static_cast<double>(r) <= state.config.rank_threshold * size) {
          return true;
        }
      }
      return false;
    }
    case ReplicationStrategy::neighbor_popularity_rank:
    case ReplicationStrategy::neighbor_hormone_rank: {
      const auto d = neighbor_region_rank(state, src, t.unit, strategy);
      return d.has_value() && d->rank < d->threshold;
    }
  }
  return false;
}

namespace {

void commit(SimulationState& state, const Transfer& t, ReplicationStrategy strategy) {
  const Step now = state.clock;
  Replica& arrived = state.store.add(t.to, t.unit, now);
  arrived.hop_index = t.hop_index + 1;
  arrived.journey_id = t.journey_id;
  state.transfers.release(t.to, t.unit);
  ++state.metrics.transport.committed;
  if (state.config.trace_transfers) {
    state.metrics.transfers.push_back(TransferTrace{
        t.journey_id, t.unit, t.from, t.to, t.start_step, now, t.hop_index + 1});
  }

  const auto fulfilled = on_unit_stored(state, t.to, t.unit, now);
  if (!fulfilled.empty()) {
    if (Replica* r = state.store.find(t.to, t.unit)) {
      r->hop_index = 0;
      r->journey_id = 0;
    }
  }

  if (!state.overlay.alive(t.from)) return;
  Replica* src = state.store.find(t.from, t.unit);
  if (src == nullptr) return;
  if (retain_at_source(state, t, strategy)) {
    src->in_delivery = false;
    src->hop_index = 0;
    src->journey_id = 0;
    src->last_used_at = now;
    ++src->use_count;
    ++state.metrics.transport.retained;
  } else {
    state.store.remove(t.from, t.unit, now);
  }
}

}  // namespace

ArrivalOutcome on_arrival(SimulationState& state, const Transfer& t,
                          ReplicationStrategy strategy) {
  if (!state.overlay.alive(t.to)) {
    state.transfers.release(t.to, t.unit);
    release_source(state, t);
    ++state.metrics.transport.dropped;
    return ArrivalOutcome::dropped;
  }
  if (state.store.holds(t.to, t.unit)) {
    state.transfers.release(t.to, t.unit);
    release_source(state, t);
    ++state.metrics.transport.duplicates;
    return ArrivalOutcome::duplicate;
  }
  const Bytes size = state.catalog.unit(t.unit).size;
  if (!state.store.fits(t.to, size)) {
    if (state.transfers.park(t, state.config.transit_buffer, state.clock)) {
      ++state.metrics.transport.parked;
      return ArrivalOutcome::parked;
    }
    state.transfers.release(t.to, t.unit);
    release_source(state, t);
    ++state.metrics.transport.failed;
    return ArrivalOutcome::failed;
  }
  commit(state, t, strategy);
  return ArrivalOutcome::committed;
}

void retry_parked(SimulationState& state, Step now) {
  for (NodeId v = 0; v < state.overlay.node_count(); ++v) {
    auto& q = state.transfers.parked(v);
    if (q.empty()) continue;
    std::deque<Transfer> keep;
    while (!q.empty()) {
      Transfer t = q.front();
      q.pop_front();
      if (state.store.holds(v, t.unit)) {
        state.transfers.release(v, t.unit);
        release_source(state, t);
        ++state.metrics.transport.duplicates;
      } else if (state.store.fits(v, state.catalog.unit(t.unit).size)) {
        commit(state, t, state.config.replication);
      } else if (now - t.parked_at >= state.config.transit_timeout) {
        state.transfers.release(v, t.unit);
        release_source(state, t);
        ++state.metrics.transport.failed;
      } else {
        keep.push_back(t);
      }
    }
    q = std::move(keep);
  }
}

}  // namespace hsim
