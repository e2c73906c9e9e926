#include "hsim/requests.hpp"

#include <algorithm>
#include <cmath>

#include "hsim/state.hpp"

namespace hsim {

bool Request::terminal() const {
  return std::none_of(slots.begin(), slots.end(), [](const RequestSlot& s) {
    return s.status == SlotStatus::open;
  });
}

bool Request::failed() const {
  return !slots.empty() &&
         std::all_of(slots.begin(), slots.end(), [](const RequestSlot& s) {
           return s.status == SlotStatus::missed;
         });
}

bool Request::any_fulfilled() const {
  return std::any_of(slots.begin(), slots.end(), [](const RequestSlot& s) {
    return s.status == SlotStatus::fulfilled;
  });
}

Request next_request(NodeId user, const Request* previous,
                     const RequestOptions& opts, const ZipfSampler& popularity,
                     Rng& rng, Step now) {
  if (opts.max_keywords_per_request < 1) {
    throw Error("requests: max_keywords_per_request must be >= 1");
  }
  Request r;
  r.user = user;
  r.issued_at = now;
  const auto wanted = static_cast<std::size_t>(std::min<std::int64_t>(
      rng.between(1, opts.max_keywords_per_request),
      static_cast<std::int64_t>(popularity.size())));

  auto contains = [&](KeywordId k) {
    return std::any_of(r.slots.begin(), r.slots.end(),
                       [&](const RequestSlot& s) { return s.keyword == k; });
  };

  if (opts.taste_prob > 0.0 && previous != nullptr && previous->any_fulfilled() &&
      rng.bernoulli(opts.taste_prob)) {
    std::vector<KeywordId> liked;
    for (const auto& s : previous->slots) {
      if (s.status == SlotStatus::fulfilled) liked.push_back(s.keyword);
    }
    r.slots.push_back(RequestSlot{liked[rng.below(liked.size())], now});
  }
  while (r.slots.size() < wanted) {
    const auto k = static_cast<KeywordId>(popularity.sample(rng));
    if (!contains(k)) r.slots.push_back(RequestSlot{k, now});
  }
  return r;
}

Step compute_deadline(KeywordId keyword, const Catalog& catalog,
                      double bandwidth_bps, int maxhops, Step now, double dt) {
  const double bits = catalog.mean_size(keyword) * 8.0;
  const double seconds = static_cast<double>(maxhops) * bits / bandwidth_bps;
  const auto steps = static_cast<Step>(std::ceil(seconds / dt - 1e-9));
  return now + std::max<Step>(steps, 1);
}

double presentation_seconds(Bytes size, double playback_bps) {
  return static_cast<double>(size) * 8.0 / playback_bps;
}

RequestBook::RequestBook(std::size_t nodes)
    : current_(nodes), terminal_at_(nodes, -1), dropped_(nodes, 0), history_(nodes),
      ranks_(nodes),
      ranks_stale_(nodes, 1) {}

const Request* RequestBook::current(NodeId user) const {
  const auto& r = current_.at(user);
  return r ? &*r : nullptr;
}

Request* RequestBook::current(NodeId user) {
  auto& r = current_.at(user);
  return r ? &*r : nullptr;
}

bool RequestBook::has_open(NodeId user) const {
  const Request* r = current(user);
  return r != nullptr && !r->terminal();
}

bool RequestBook::idle(NodeId user, Step now) const {
  if (dropped_.at(user)) return false;
  if (has_open(user)) return false;
  return terminal_at_[user] < now;
}

Request& RequestBook::issue(Request request) {
  const NodeId user = request.user;
  if (has_open(user)) {
    throw Error("requests: user " + std::to_string(user) +
                " already has an open request");
  }
  for (const auto& s : request.slots) ++history_.at(user)[s.keyword];
  ranks_stale_[user] = 1;
  current_.at(user) = std::move(request);
  return *current_[user];
}

void RequestBook::mark_terminal(NodeId user, Step now) { terminal_at_.at(user) = now; }

void RequestBook::drop(NodeId user) {
  current_.at(user).reset();
  dropped_.at(user) = 1;
}

std::uint32_t RequestBook::request_count(NodeId user, KeywordId keyword) const {
  const auto& h = history_.at(user);
  auto it = h.find(keyword);
  return it == h.end() ? 0 : it->second;
}

std::size_t RequestBook::popularity_rank(NodeId user, KeywordId keyword) const {
  const auto& h = history_.at(user);
  auto& ranks = ranks_[user];
  if (ranks_stale_[user]) {
    std::vector<std::pair<KeywordId, std::uint32_t>> order(h.begin(), h.end());
    std::sort(order.begin(), order.end(), [](const auto& a, const auto& b) {
      return a.second != b.second ? a.second > b.second : a.first < b.first;
    });
    ranks.clear();
    for (std::size_t i = 0; i < order.size(); ++i) {
      ranks.emplace_back(order[i].first, static_cast<std::uint32_t>(i + 1));
    }
    std::sort(ranks.begin(), ranks.end());
    ranks_stale_[user] = 0;
  }
  auto it = std::lower_bound(ranks.begin(), ranks.end(), keyword,
                             [](const auto& e, KeywordId k) { return e.first < k; });
  return (it == ranks.end() || it->first != keyword) ? 0 : it->second;
}

namespace {

void record_terminal_slot(SimulationState& state, const Request& r,
                          const RequestSlot& slot, Step now,
                          std::vector<SlotOutcome>& out) {
  const bool missed = slot.status == SlotStatus::missed;
  const Step delay = missed ? slot.deadline - r.issued_at : now - r.issued_at;
  state.metrics.delays.push_back(DelaySample{now, delay, missed});
  if (missed) {
    ++state.metrics.slots_missed;
  } else {
    ++state.metrics.slots_fulfilled;
  }
  if (state.config.trace_slots) {
    state.metrics.slot_events.push_back(
        SlotEvent{r.user, slot.keyword, r.issued_at, missed, delay});
  }
  out.push_back(SlotOutcome{r.user, slot.keyword, delay, missed});
}

void finish_if_terminal(SimulationState& state, Request& r, Step now) {
  if (!r.terminal()) return;
  if (r.failed()) {
    ++state.metrics.node_requests_failed[r.user];
  } else {
    ++state.metrics.node_requests_ok[r.user];
  }
  state.requests.mark_terminal(r.user, now);
}

// Lowest-id unit stored at the node that carries the keyword.
std::optional<UnitId> local_unit_for(const SimulationState& state, NodeId node,
                                     KeywordId keyword) {
  const auto index = state.store.keyword_index(node);
  auto it = std::lower_bound(index.begin(), index.end(), std::pair<KeywordId, UnitId>{keyword, 0});
  if (it == index.end() || it->first != keyword) return std::nullopt;
  return it->second;
}

}  // namespace

std::vector<HormoneSlot> issue_requests(SimulationState& state, Step now) {
  std::vector<HormoneSlot> fresh;
  const auto& cfg = state.config;
  for (NodeId user = 0; user < state.overlay.node_count(); ++user) {
    if (!state.overlay.alive(user) || !state.requests.idle(user, now)) continue;
    Request r = next_request(user, state.requests.current(user), cfg.requests,
                             state.popularity, state.request_rng, now);
    for (auto& slot : r.slots) {
      slot.deadline = compute_deadline(slot.keyword, state.catalog,
                                       cfg.bandwidth_bps, cfg.params.maxhops,
                                       now, cfg.dt);
    }
    state.requests.issue(std::move(r));
    ++state.metrics.requests_issued;

    Request& issued = *state.requests.current(user);
    for (std::size_t i = 0; i < issued.slots.size(); ++i) {
      if (issued.slots[i].status != SlotStatus::open) continue;
      if (auto unit = local_unit_for(state, user, issued.slots[i].keyword)) {
        on_unit_stored(state, user, *unit, now);
      }
    }
    const Request* after = state.requests.current(user);
    for (const auto& slot : after->slots) {
      if (slot.status == SlotStatus::open) fresh.push_back(HormoneSlot{user, slot.keyword});
    }
  }
  return fresh;
}

std::vector<SlotOutcome> on_unit_stored(SimulationState& state, NodeId node,
                                        UnitId unit, Step now) {
  std::vector<SlotOutcome> out;
  Request* r = state.requests.current(node);
  if (r == nullptr || r->terminal()) return out;
  const auto& kws = state.catalog.unit(unit).keywords;
  for (auto& slot : r->slots) {
    if (slot.status != SlotStatus::open) continue;
    if (!std::binary_search(kws.begin(), kws.end(), slot.keyword)) continue;
    slot.status = SlotStatus::fulfilled;
    slot.terminal_at = now;
    record_terminal_slot(state, *r, slot, now, out);
  }
  if (out.empty()) return out;

  ++state.metrics.presentation_starts[unit];
  if (Replica* rep = state.store.find(node, unit)) {
    rep->last_used_at = now;
    ++rep->use_count;
  }
  finish_if_terminal(state, *r, now);
  return out;
}

std::vector<SlotOutcome> expire_slots(SimulationState& state, Step now) {
  std::vector<SlotOutcome> out;
  for (NodeId user = 0; user < state.overlay.node_count(); ++user) {
    Request* r = state.requests.current(user);
    if (r == nullptr || r->terminal()) continue;
    bool changed = false;
    for (auto& slot : r->slots) {
      if (slot.status == SlotStatus::open && slot.deadline < now) {
        slot.status = SlotStatus::missed;
        slot.terminal_at = now;
        record_terminal_slot(state, *r, slot, now, out);
        changed = true;
      }
    }
    if (changed) finish_if_terminal(state, *r, now);
  }
  return out;
}

std::vector<HormoneSlot> open_slots(const SimulationState& state, Step now) {
  std::vector<HormoneSlot> out;
  for (NodeId user = 0; user < state.overlay.node_count(); ++user) {
    if (!state.overlay.alive(user)) continue;
    const Request* r = state.requests.current(user);
    if (r == nullptr || r->issued_at >= now) continue;
    for (const auto& slot : r->slots) {
      if (slot.status == SlotStatus::open) out.push_back(HormoneSlot{user, slot.keyword});
    }
  }
  return out;
}

}  // namespace hsim
