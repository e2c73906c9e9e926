#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

#include "hsim/types.hpp"

namespace hsim {

struct Link {
  NodeId to;
  double bandwidth_bps;
};

struct Edge {
  NodeId u;
  NodeId v;
  double bandwidth_bps;

  friend bool operator==(const Edge&, const Edge&) = default;
};

// Undirected overlay of peers. Adjacency lists are kept sorted by neighbour
// id so that every traversal is deterministic. Removed nodes keep their
// incident links in storage, but those links are never reported by the
// alive-only queries.
class Overlay {
 public:
  Overlay() = default;
  explicit Overlay(std::size_t node_count);

  std::size_t node_count() const { return adjacency_.size(); }
  std::size_t alive_count() const { return alive_count_; }
  bool alive(NodeId node) const { return alive_.at(node) != 0; }

  void add_edge(NodeId u, NodeId v, double bandwidth_bps);
  bool remove_edge(NodeId u, NodeId v);
  bool has_edge(NodeId u, NodeId v) const;
  double bandwidth(NodeId u, NodeId v) const;

  // Every stored link of a node, including links to removed nodes.
  std::span<const Link> links(NodeId node) const { return adjacency_.at(node); }
  std::vector<NodeId> alive_neighbors(NodeId node) const;
  std::size_t degree(NodeId node) const { return adjacency_.at(node).size(); }
  std::size_t alive_degree(NodeId node) const;

  std::size_t edge_count() const { return edge_count_; }
  // Edges with u < v, sorted lexicographically.
  std::vector<Edge> edges() const;
  // Edges whose endpoints are both alive.
  std::vector<Edge> alive_edges() const;

  // Marks a node dead. Isolated components are left as they are.
  void remove_node(NodeId node);

  bool connected() const;

  template <typename Fn>
  void for_each_alive_link(NodeId node, Fn&& fn) const {
    for (const Link& l : adjacency_[node]) {
      if (alive_[l.to]) fn(l);
    }
  }

 private:
  void check_node(NodeId node) const;

  std::vector<std::vector<Link>> adjacency_;
  std::vector<std::uint8_t> alive_;
  std::size_t alive_count_ = 0;
  std::size_t edge_count_ = 0;
};

struct RandomOverlayOptions {
  std::size_t nodes = 50;
  double edge_probability = 0.1;
  double bandwidth_bps = 100e6;
  // Per-edge bandwidth is bandwidth_bps * jitter^u with u ~ U(-1, 1).
  // A factor of 1 gives uniform links.
  double bandwidth_jitter = 1.0;
  int max_attempts = 1000;
};

// Connected G(n, p). Resamples with an incremented sub-seed until the graph
// is connected; throws once max_attempts samples have failed.
Overlay generate_random_overlay(const RandomOverlayOptions& opts,
                                std::uint64_t seed);

struct PowerLawOverlayOptions {
  std::size_t nodes = 1000;
  std::size_t target_edges = 1600;
  std::size_t rewire_steps = 16000;
  double bandwidth_bps = 100e6;
  double bandwidth_jitter = 1.0;
};

// Random connected graph with exactly target_edges edges, rewired towards a
// power-law degree distribution: each step drops a uniform edge and adds one
// between a uniform node and a degree-proportional node. Steps that would
// disconnect the graph or create a duplicate edge are rolled back.
Overlay generate_power_law_overlay(const PowerLawOverlayOptions& opts,
                                   std::uint64_t seed);

// Longest shortest path (hops) among alive nodes. Throws if the alive
// subgraph is disconnected.
int diameter(const Overlay& overlay);

// Median diameter of random overlays built with seeds 1..seeds; a seed
// that yields no connected graph counts as infinite.
double median_random_diameter(RandomOverlayOptions opts, int seeds);

// Edge probability in the middle of the range whose median diameter over
// seeds 1..seeds equals target: both ends of the range are found by
// bisection on [lo, hi].
struct Calibration {
  double edge_probability = 0.0;
  double range_low = 0.0;
  double range_high = 0.0;
};
Calibration calibrate_edge_probability(RandomOverlayOptions opts, int target_diameter,
                                       int seeds = 20, double lo = 0.01, double hi = 1.0,
                                       int iterations = 30);

// Hop distances from source over alive nodes; -1 marks unreachable.
std::vector<int> bfs_distances(const Overlay& overlay, NodeId source);

// Edge-list text format: "nodes <n>" header, then "u v bandwidth_bps" lines.
void write_edge_list(std::ostream& out, const Overlay& overlay);
Overlay read_edge_list(std::istream& in);

}  // namespace hsim
