#pragma once

#include <functional>
#include <iosfwd>
#include <span>
#include <utility>
#include <vector>

#include "hsim/topology.hpp"
#include "hsim/types.hpp"

namespace hsim {

// Tunables of the hormone dynamics. Defaults are the published optimized
// set.
struct ParameterSet {
  double eta0 = 3.95;     // hormone deposited when a keyword is requested
  double eta = 4.39;      // per-step raise while the request is open
  double alpha = 0.45;    // fraction forwarded to neighbours each step
  double epsilon = 0.16;  // evaporation subtrahend
  double m = 0.23;        // minimum gradient to move a unit
  double c = 0.60;        // clean-up trigger, fraction of capacity
  double t = 0.23;        // minimum hormone strength (noise floor)
  int maxhops = 10;

  void validate() const;
  friend bool operator==(const ParameterSet&, const ParameterSet&) = default;
};

struct HormoneSlot {
  NodeId node;
  KeywordId keyword;
};

// Per-keyword hormone levels. Each keyword keeps a node-sorted list of
// positive levels, so keywords nobody asked for cost nothing; a dense mirror
// serves point lookups.
class HormoneField {
 public:
  struct Entry {
    NodeId node;
    double level;
  };
  using Residence = std::function<bool(NodeId, KeywordId)>;

  HormoneField() = default;
  HormoneField(std::size_t nodes, std::size_t keywords);

  std::size_t node_count() const { return nodes_; }
  std::size_t keyword_count() const { return by_keyword_.size(); }

  double level(NodeId node, KeywordId keyword) const;
  const std::vector<Entry>& entries(KeywordId keyword) const {
    return by_keyword_.at(keyword);
  }
  bool has_any(KeywordId keyword) const { return !by_keyword_[keyword].empty(); }

  void deposit(const Overlay& overlay, NodeId node, KeywordId keyword,
               double amount);
  void raise_open_requests(const Overlay& overlay,
                           std::span<const HormoneSlot> open_slots, double eta);

  // One synchronous diffusion step. Outflows are computed from the pre-step
  // field. A node for which residence(node, keyword) holds forwards nothing.
  void diffuse(const Overlay& overlay, double alpha, const Residence& residence);

  // level -> max(level - epsilon, 0), then levels below t become 0.
  void evaporate(double epsilon, double t);

  // Alive neighbours with level(neighbour) - level(node), sorted by delta
  // descending, ties by ascending node id.
  std::vector<std::pair<NodeId, double>> gradient(const Overlay& overlay,
                                                  NodeId node,
                                                  KeywordId keyword) const;

  // Positive (keyword, level) pairs held at a node, keyword ascending.
  const std::vector<std::pair<KeywordId, double>>& node_levels(NodeId node) const;

  void clear_node(NodeId node);
  double total_mass() const;

  // CSV rows "step,node,keyword,level" for every positive level.
  void dump_csv(std::ostream& out, Step step) const;

 private:
  void touch() { node_index_valid_ = false; }
  std::size_t cell(NodeId node, KeywordId keyword) const {
    return static_cast<std::size_t>(keyword) * nodes_ + node;
  }
  void rebuild_node_index() const;

  std::size_t nodes_ = 0;
  std::vector<std::vector<Entry>> by_keyword_;

  std::vector<double> scratch_;
  std::vector<std::uint8_t> marked_;
  std::vector<NodeId> touched_;
  std::vector<double> dense_;  // keyword * nodes + node, mirrors by_keyword_

  mutable bool node_index_valid_ = false;
  mutable std::vector<std::vector<std::pair<KeywordId, double>>> by_node_;
};

}  // namespace hsim
