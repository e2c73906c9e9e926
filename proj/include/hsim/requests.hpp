#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <vector>

#include "hsim/content.hpp"
#include "hsim/hormone.hpp"
#include "hsim/rng.hpp"
#include "hsim/types.hpp"

namespace hsim {

struct SimulationState;

enum class SlotStatus : std::uint8_t { open, fulfilled, missed };

struct RequestSlot {
  KeywordId keyword = 0;
  Step deadline = 0;
  SlotStatus status = SlotStatus::open;
  Step terminal_at = -1;
};

struct Request {
  NodeId user = 0;
  Step issued_at = 0;
  std::vector<RequestSlot> slots;

  bool terminal() const;
  // Every slot missed its deadline.
  bool failed() const;
  bool any_fulfilled() const;
};

struct RequestOptions {
  int max_keywords_per_request = 4;
  double taste_prob = 0.5;
  double playback_bps = 1e6;
};

// Draws the keyword set of a user's next request. Keyword count is uniform in
// [1, max_keywords_per_request]; keywords are distinct draws from the
// popularity distribution. With probability taste_prob, and if the previous
// request had a fulfilled slot, one of its fulfilled keywords is reused.
// Deadlines are left at `now`; see compute_deadline.
Request next_request(NodeId user, const Request* previous,
                     const RequestOptions& opts, const ZipfSampler& popularity,
                     Rng& rng, Step now);

// now + ceil(maxhops * mean_bits(keyword) / bandwidth / dt), at least now + 1.
Step compute_deadline(KeywordId keyword, const Catalog& catalog,
                      double bandwidth_bps, int maxhops, Step now, double dt);

// Playback time of a unit at the given bit rate.
double presentation_seconds(Bytes size, double playback_bps);

// Per-user current request plus the local request history used by the
// popularity-based replication rules.
class RequestBook {
 public:
  RequestBook() = default;
  explicit RequestBook(std::size_t nodes);

  // The user's current request, terminal or not.
  const Request* current(NodeId user) const;
  Request* current(NodeId user);
  bool has_open(NodeId user) const;
  // True when the user may issue a new request at step `now`.
  bool idle(NodeId user, Step now) const;

  Request& issue(Request request);
  void mark_terminal(NodeId user, Step now);
  void drop(NodeId user);

  std::uint32_t request_count(NodeId user, KeywordId keyword) const;
  // 1-based rank of the keyword in the node's request history (most
  // requested first, ties by keyword id); 0 when never requested.
  std::size_t popularity_rank(NodeId user, KeywordId keyword) const;
  std::size_t history_size(NodeId user) const { return history_.at(user).size(); }

 private:
  std::vector<std::optional<Request>> current_;
  std::vector<Step> terminal_at_;
  std::vector<std::uint8_t> dropped_;
  std::vector<std::map<KeywordId, std::uint32_t>> history_;
  // (keyword, rank) sorted by keyword, rebuilt lazily after a user's history changes.
  mutable std::vector<std::vector<std::pair<KeywordId, std::uint32_t>>> ranks_;
  mutable std::vector<std::uint8_t> ranks_stale_;
};

struct SlotOutcome {
  NodeId user = 0;
  KeywordId keyword = 0;
  Step delay_steps = 0;
  bool missed = false;
};

// Issues requests for every alive idle user. Slots whose keyword is already
// stored locally are fulfilled at once with delay 0. Returns the newly open
// slots, which receive the initial hormone deposit.
std::vector<HormoneSlot> issue_requests(SimulationState& state, Step now);

// Fulfills every open slot at `node` matching one of the unit's keywords.
std::vector<SlotOutcome> on_unit_stored(SimulationState& state, NodeId node,
                                        UnitId unit, Step now);

// Open slots whose deadline has passed become missed.
std::vector<SlotOutcome> expire_slots(SimulationState& state, Step now);

// Open slots of alive users issued before `now`.
std::vector<HormoneSlot> open_slots(const SimulationState& state, Step now);

}  // namespace hsim
