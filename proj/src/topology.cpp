#include "hsim/topology.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>
#include <string>

#include "hsim/rng.hpp"

namespace hsim {

namespace {

auto find_link(std::vector<Link>& links, NodeId to) {
  return std::lower_bound(links.begin(), links.end(), to,
                          [](const Link& l, NodeId id) { return l.to < id; });
}

auto find_link(const std::vector<Link>& links, NodeId to) {
  return std::lower_bound(links.begin(), links.end(), to,
                          [](const Link& l, NodeId id) { return l.to < id; });
}

double jittered(double bandwidth, double jitter, Rng& rng) {
  if (jitter == 1.0) return bandwidth;
  return bandwidth * std::pow(jitter, rng.uniform(-1.0, 1.0));
}

std::string format_double(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

}  // namespace

Overlay::Overlay(std::size_t node_count)
    : adjacency_(node_count),
      alive_(node_count, 1),
      alive_count_(node_count) {}

void Overlay::check_node(NodeId node) const {
  if (node >= adjacency_.size()) {
    throw Error("overlay: node id " + std::to_string(node) + " out of range");
  }
}

void Overlay::add_edge(NodeId u, NodeId v, double bandwidth_bps) {
  check_node(u);
  check_node(v);
  if (u == v) throw Error("overlay: self-loop on node " + std::to_string(u));
  if (!(bandwidth_bps > 0.0)) throw Error("overlay: bandwidth must be > 0");
  auto& lu = adjacency_[u];
  auto it = find_link(lu, v);
  if (it != lu.end() && it->to == v) {
    throw Error("overlay: duplicate edge " + std::to_string(u) + "-" +
                std::to_string(v));
  }
  lu.insert(it, Link{v, bandwidth_bps});
  auto& lv = adjacency_[v];
  lv.insert(find_link(lv, u), Link{u, bandwidth_bps});
  ++edge_count_;
}

bool Overlay::remove_edge(NodeId u, NodeId v) {
  check_node(u);
  check_node(v);
  auto& lu = adjacency_[u];
  auto it = find_link(lu, v);
  if (it == lu.end() || it->to != v) return false;
  lu.erase(it);
  auto& lv = adjacency_[v];
  lv.erase(find_link(lv, u));
  --edge_count_;
  return true;
}

bool Overlay::has_edge(NodeId u, NodeId v) const {
  check_node(u);
  check_node(v);
  const auto& lu = adjacency_[u];
  auto it = find_link(lu, v);
  return it != lu.end() && it->to == v;
}

double Overlay::bandwidth(NodeId u, NodeId v) const {
  check_node(u);
  const auto& lu = adjacency_[u];
  auto it = find_link(lu, v);
  if (it == lu.end() || it->to != v) {
    throw Error("overlay: no edge " + std::to_string(u) + "-" +
                std::to_string(v));
  }
  return it->bandwidth_bps;
}

std::vector<NodeId> Overlay::alive_neighbors(NodeId node) const {
  check_node(node);
  std::vector<NodeId> out;
  for (const Link& l : adjacency_[node]) {
    if (alive_[l.to]) out.push_back(l.to);
  }
  return out;
}

std::size_t Overlay::alive_degree(NodeId node) const {
  check_node(node);
  std::size_t d = 0;
  for (const Link& l : adjacency_[node]) d += alive_[l.to];
  return d;
}

std::vector<Edge> Overlay::edges() const {
  std::vector<Edge> out;
  out.reserve(edge_count_);
  for (NodeId u = 0; u < adjacency_.size(); ++u) {
    for (const Link& l : adjacency_[u]) {
      if (u < l.to) out.push_back(Edge{u, l.to, l.bandwidth_bps});
    }
  }
  return out;
}

std::vector<Edge> Overlay::alive_edges() const {
  std::vector<Edge> out;
  for (NodeId u = 0; u < adjacency_.size(); ++u) {
    if (!alive_[u]) continue;
    for (const Link& l : adjacency_[u]) {
      if (u < l.to && alive_[l.to]) out.push_back(Edge{u, l.to, l.bandwidth_bps});
    }
  }
  return out;
}

void Overlay::remove_node(NodeId node) {
  check_node(node);
  if (!alive_[node]) {
    throw Error("overlay: node " + std::to_string(node) + " already removed");
  }
  alive_[node] = 0;
  --alive_count_;
}

bool Overlay::connected() const {
  NodeId start = kNoNode;
  for (NodeId u = 0; u < adjacency_.size(); ++u) {
    if (alive_[u]) {
      start = u;
      break;
    }
  }
  if (start == kNoNode) return true;
  const auto dist = bfs_distances(*this, start);
  for (NodeId u = 0; u < adjacency_.size(); ++u) {
    if (alive_[u] && dist[u] < 0) return false;
  }
  return true;
}

std::vector<int> bfs_distances(const Overlay& overlay, NodeId source) {
  std::vector<int> dist(overlay.node_count(), -1);
  if (!overlay.alive(source)) return dist;
  std::vector<NodeId> frontier{source};
  dist[source] = 0;
  for (std::size_t head = 0; head < frontier.size(); ++head) {
    const NodeId u = frontier[head];
    overlay.for_each_alive_link(u, [&](const Link& l) {
      if (dist[l.to] < 0) {
        dist[l.to] = dist[u] + 1;
        frontier.push_back(l.to);
      }
    });
  }
  return dist;
}

int diameter(const Overlay& overlay) {
  int best = 0;
  for (NodeId u = 0; u < overlay.node_count(); ++u) {
    if (!overlay.alive(u)) continue;
    const auto dist = bfs_distances(overlay, u);
    for (NodeId v = 0; v < overlay.node_count(); ++v) {
      if (!overlay.alive(v)) continue;
      if (dist[v] < 0) throw Error("diameter: alive subgraph is disconnected");
      best = std::max(best, dist[v]);
    }
  }
  return best;
}

Overlay generate_random_overlay(const RandomOverlayOptions& opts,
                                std::uint64_t seed) {
  if (opts.nodes < 2) throw Error("random overlay: need at least 2 nodes");
  if (!(opts.edge_probability > 0.0 && opts.edge_probability <= 1.0)) {
    throw Error("random overlay: edge_probability must be in (0, 1]");
  }
  for (int attempt = 0; attempt < opts.max_attempts; ++attempt) {
    Rng rng = Rng::substream(seed, "topology.random", attempt);
    Rng bw_rng = Rng::substream(seed, "topology.bandwidth", attempt);
    Overlay o(opts.nodes);
    for (NodeId u = 0; u < opts.nodes; ++u) {
      for (NodeId v = u + 1; v < opts.nodes; ++v) {
        if (rng.bernoulli(opts.edge_probability)) {
          o.add_edge(u, v, jittered(opts.bandwidth_bps, opts.bandwidth_jitter, bw_rng));
        }
      }
    }
    if (o.connected()) return o;
  }
  throw Error("random overlay: no connected graph after " +
              std::to_string(opts.max_attempts) +
              " attempts; edge_probability too low");
}

Overlay generate_power_law_overlay(const PowerLawOverlayOptions& opts,
                                   std::uint64_t seed) {
  const std::size_t n = opts.nodes;
  if (n < 2) throw Error("power-law overlay: need at least 2 nodes");
  const std::size_t max_edges = n * (n - 1) / 2;
  if (opts.target_edges < n - 1 || opts.target_edges > max_edges) {
    throw Error("power-law overlay: target_edges must be in [n-1, n(n-1)/2]");
  }
  Rng rng = Rng::substream(seed, "topology.powerlaw");
  Rng bw_rng = Rng::substream(seed, "topology.bandwidth");
  auto bw = [&] { return jittered(opts.bandwidth_bps, opts.bandwidth_jitter, bw_rng); };

  Overlay o(n);
  std::vector<std::pair<NodeId, NodeId>> edges;
  edges.reserve(opts.target_edges);

  // Random recursive tree over a shuffled node order keeps the start graph
  // connected; uniform extra edges fill up to target_edges.
  std::vector<NodeId> order(n);
  for (NodeId i = 0; i < n; ++i) order[i] = i;
  rng.shuffle(order);
  for (std::size_t i = 1; i < n; ++i) {
    const NodeId u = order[i];
    const NodeId v = order[rng.below(i)];
    o.add_edge(u, v, bw());
    edges.emplace_back(u, v);
  }
  while (edges.size() < opts.target_edges) {
    const auto u = static_cast<NodeId>(rng.below(n));
    const auto v = static_cast<NodeId>(rng.below(n));
    if (u == v || o.has_edge(u, v)) continue;
    o.add_edge(u, v, bw());
    edges.emplace_back(u, v);
  }

  // Reachability scratch for the disconnect check.
  std::vector<std::uint32_t> seen(n, 0);
  std::uint32_t epoch = 0;
  std::vector<NodeId> stack;
  auto reachable = [&](NodeId from, NodeId to) {
    ++epoch;
    stack.assign(1, from);
    seen[from] = epoch;
    while (!stack.empty()) {
      const NodeId x = stack.back();
      stack.pop_back();
      if (x == to) return true;
      for (const Link& l : o.links(x)) {
        if (seen[l.to] != epoch) {
          seen[l.to] = epoch;
          stack.push_back(l.to);
        }
      }
    }
    return false;
  };

  const std::size_t m = edges.size();
  for (std::size_t step = 0; step < opts.rewire_steps && m > 1; ++step) {
    const std::size_t idx = rng.below(m);
    const auto [a, b] = edges[idx];
    const double old_bw = o.bandwidth(a, b);
    o.remove_edge(a, b);

    // A uniformly chosen endpoint of a uniformly chosen remaining edge is a
    // degree-proportional node.
    std::size_t pick = rng.below(m - 1);
    if (pick >= idx) ++pick;
    const NodeId target = rng.bernoulli(0.5) ? edges[pick].first : edges[pick].second;
    const auto source = static_cast<NodeId>(rng.below(n));
    const double new_bw = bw();

    if (source == target || o.has_edge(source, target)) {
      o.add_edge(a, b, old_bw);
      continue;
    }
    o.add_edge(source, target, new_bw);
    if (!reachable(a, b)) {
      o.remove_edge(source, target);
      o.add_edge(a, b, old_bw);
      continue;
    }
    edges[idx] = {source, target};
  }
  return o;
}

void write_edge_list(std::ostream& out, const Overlay& overlay) {
  out << "nodes " << overlay.node_count() << '\n';
  for (const Edge& e : overlay.edges()) {
    out << e.u << ' ' << e.v << ' ' << format_double(e.bandwidth_bps) << '\n';
  }
}

Overlay read_edge_list(std::istream& in) {
  std::string line;
  std::size_t n = 0;
  bool have_header = false;
  Overlay o;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ss(line);
    if (!have_header) {
      std::string word;
      if (!(ss >> word >> n) || word != "nodes") {
        throw Error("edge list: expected 'nodes <n>' header");
      }
      o = Overlay(n);
      have_header = true;
      continue;
    }
    long long u = 0, v = 0;
    double bw = 0.0;
    if (!(ss >> u >> v >> bw) || u < 0 || v < 0) {
      throw Error("edge list: malformed line " + std::to_string(line_no));
    }
    o.add_edge(static_cast<NodeId>(u), static_cast<NodeId>(v), bw);
  }
  if (!have_header) throw Error("edge list: empty input");
  return o;
}

double median_random_diameter(RandomOverlayOptions opts, int seeds) {
  if (seeds < 1) throw Error("calibration: seeds must be >= 1");
  std::vector<double> d;
  for (int s = 1; s <= seeds; ++s) {
    try {
      d.push_back(diameter(generate_random_overlay(opts, static_cast<std::uint64_t>(s))));
    } catch (const Error&) {
      // No connected graph within max_attempts: as good as infinitely wide.
      d.push_back(std::numeric_limits<double>::infinity());
    }
  }
  std::sort(d.begin(), d.end());
  const std::size_t mid = d.size() / 2;
  return d.size() % 2 ? d[mid] : 0.5 * (d[mid - 1] + d[mid]);
}

Calibration calibrate_edge_probability(RandomOverlayOptions opts, int target_diameter,
                                       int seeds, double lo, double hi, int iterations) {
  if (target_diameter < 1) throw Error("calibration: target diameter must be >= 1");
  // Smallest p on [lo, hi] whose median diameter is at most `bound`.
  auto smallest = [&](double bound) {
    double a = lo;
    double b = hi;
    for (int i = 0; i < iterations; ++i) {
      const double mid = 0.5 * (a + b);
      opts.edge_probability = mid;
      if (median_random_diameter(opts, seeds) <= bound) {
        b = mid;
      } else {
        a = mid;
      }
    }
    return b;
  };
  Calibration c;
  c.range_low = smallest(target_diameter);
  c.range_high = smallest(target_diameter - 0.5);
  c.edge_probability = 0.5 * (c.range_low + c.range_high);
  return c;
}

}  // namespace hsim
