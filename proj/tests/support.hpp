#pragma once

#include <memory>
#include <vector>

#include "hsim/engine.hpp"

namespace hsim::test {

inline Overlay line_overlay(std::size_t n, double bw = 100e6) {
  Overlay o(n);
  for (NodeId v = 0; v + 1 < n; ++v) o.add_edge(v, v + 1, bw);
  return o;
}

inline Overlay star_overlay(std::size_t n, double bw = 100e6) {
  Overlay o(n);
  for (NodeId v = 1; v < n; ++v) o.add_edge(0, v, bw);
  return o;
}

inline Overlay complete_overlay(std::size_t n, double bw = 100e6) {
  Overlay o(n);
  for (NodeId u = 0; u < n; ++u) {
    for (NodeId v = u + 1; v < n; ++v) o.add_edge(u, v, bw);
  }
  return o;
}

// Units with the given sizes; unit i carries keyword i % keywords.
inline Catalog simple_catalog(const std::vector<Bytes>& sizes, std::size_t keywords) {
  std::vector<Unit> units;
  for (std::size_t i = 0; i < sizes.size(); ++i) {
    Unit u;
    u.id = static_cast<UnitId>(i);
    u.size = sizes[i];
    u.primary_keyword = static_cast<KeywordId>(i % keywords);
    u.keywords = {u.primary_keyword};
    units.push_back(u);
  }
  return Catalog(std::move(units), keywords, 1.0);
}

inline std::unique_ptr<SimulationState> make_state(Overlay o, Catalog c,
                                                   SimulationConfig cfg = {},
                                                   std::uint64_t seed = 1) {
  return std::make_unique<SimulationState>(cfg, std::move(o), std::move(c), seed);
}

// Hop distances by repeated relaxation over the edge list, independent of
// the library's BFS.
inline std::vector<std::vector<int>> floyd_warshall(const Overlay& o) {
  const std::size_t n = o.node_count();
  const int inf = 1 << 28;
  std::vector<std::vector<int>> d(n, std::vector<int>(n, inf));
  for (std::size_t i = 0; i < n; ++i) d[i][i] = 0;
  for (const Edge& e : o.alive_edges()) d[e.u][e.v] = d[e.v][e.u] = 1;
  for (std::size_t k = 0; k < n; ++k)
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j)
        if (d[i][k] + d[k][j] < d[i][j]) d[i][j] = d[i][k] + d[k][j];
  return d;
}

inline int oracle_diameter(const Overlay& o) {
  const auto d = floyd_warshall(o);
  int best = 0;
  for (std::size_t i = 0; i < d.size(); ++i) {
    if (!o.alive(static_cast<NodeId>(i))) continue;
    for (std::size_t j = 0; j < d.size(); ++j) {
      if (o.alive(static_cast<NodeId>(j))) best = std::max(best, d[i][j]);
    }
  }
  return best;
}

}  // namespace hsim::test
