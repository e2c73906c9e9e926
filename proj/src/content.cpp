#include "hsim/content.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <numeric>
#include <ostream>
#include <queue>
#include <sstream>
#include <string>
#include <tuple>

#include "hsim/rng.hpp"

namespace hsim {

namespace {

double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }

}  // namespace

double truncated_lognormal_mean(double mu, double sigma, double lo, double hi) {
  const double a = std::log(lo);
  const double b = std::log(hi);
  const double mass = normal_cdf((b - mu) / sigma) - normal_cdf((a - mu) / sigma);
  const double shifted = normal_cdf((b - mu - sigma * sigma) / sigma) -
                         normal_cdf((a - mu - sigma * sigma) / sigma);
  return std::exp(mu + 0.5 * sigma * sigma) * shifted / mass;
}

double solve_truncated_lognormal_mu(double mean, double lo, double hi,
                                    double sigma) {
  if (!(lo < mean && mean < hi)) {
    throw Error("unit sizes: mean must lie strictly between min and max");
  }
  double left = std::log(lo) - 6.0 * sigma;
  double right = std::log(hi) + 6.0 * sigma;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (left + right);
    if (truncated_lognormal_mean(mid, sigma, lo, hi) < mean) {
      left = mid;
    } else {
      right = mid;
    }
  }
  return 0.5 * (left + right);
}

Catalog::Catalog(std::vector<Unit> units, std::size_t keyword_count,
                 double zipf_exponent)
    : units_(std::move(units)),
      by_keyword_(keyword_count),
      mean_size_(keyword_count, 0.0),
      zipf_exponent_(zipf_exponent) {
  for (std::size_t i = 0; i < units_.size(); ++i) {
    const Unit& u = units_[i];
    if (u.id != i) throw Error("catalog: unit ids must be dense and ordered");
    if (u.keywords.empty()) throw Error("catalog: unit without keywords");
    total_bytes_ += u.size;
    for (KeywordId k : u.keywords) {
      if (k >= keyword_count) throw Error("catalog: keyword id out of range");
      by_keyword_[k].push_back(u.id);
      mean_size_[k] += static_cast<double>(u.size);
    }
  }
  for (std::size_t k = 0; k < keyword_count; ++k) {
    if (by_keyword_[k].empty()) {
      throw Error("catalog: keyword " + std::to_string(k) + " has no units");
    }
    mean_size_[k] /= static_cast<double>(by_keyword_[k].size());
  }
}

void Catalog::assign_origins(const std::vector<NodeId>& origin) {
  if (origin.size() != units_.size()) {
    throw Error("catalog: origin vector does not match unit count");
  }
  for (std::size_t i = 0; i < units_.size(); ++i) units_[i].origin_node = origin[i];
}

Catalog generate_catalog(const CatalogOptions& opts, std::uint64_t seed) {
  if (opts.keywords < 1) throw Error("catalog: need at least one keyword");
  if (opts.units < opts.keywords) {
    throw Error("catalog: num_units must be >= num_keywords");
  }
  const auto& sp = opts.sizes;
  if (!(sp.min < sp.max)) throw Error("catalog: min size must be < max size");

  Rng size_rng = Rng::substream(seed, "catalog.sizes");
  Rng kw_rng = Rng::substream(seed, "catalog.keywords");
  const double lo = static_cast<double>(sp.min);
  const double hi = static_cast<double>(sp.max);
  const double mu = solve_truncated_lognormal_mu(static_cast<double>(sp.mean),
                                                 lo, hi, sp.log_sigma);

  const ZipfSampler zipf(opts.keywords, opts.zipf_exponent);
  std::vector<Unit> units(opts.units);
  for (std::size_t i = 0; i < opts.units; ++i) {
    double s;
    do {
      s = std::exp(size_rng.normal(mu, sp.log_sigma));
    } while (s < lo || s > hi);
    units[i].id = static_cast<UnitId>(i);
    units[i].size = static_cast<Bytes>(std::llround(s));
    units[i].primary_keyword = static_cast<KeywordId>(zipf.sample(kw_rng));
  }

  // Every keyword needs at least one unit: take one from the currently
  // largest keyword for each empty one.
  std::vector<std::vector<UnitId>> members(opts.keywords);
  for (const Unit& u : units) members[u.primary_keyword].push_back(u.id);
  for (KeywordId k = 0; k < opts.keywords; ++k) {
    if (!members[k].empty()) continue;
    std::size_t donor = 0;
    for (std::size_t j = 1; j < opts.keywords; ++j) {
      if (members[j].size() > members[donor].size()) donor = j;
    }
    const UnitId moved = members[donor].back();
    members[donor].pop_back();
    members[k].push_back(moved);
    units[moved].primary_keyword = k;
  }

  for (Unit& u : units) {
    u.keywords.assign(1, u.primary_keyword);
    const auto extra = kw_rng.between(0, opts.max_secondary_keywords);
    for (std::int64_t e = 0; e < extra; ++e) {
      for (int attempt = 0; attempt < 32; ++attempt) {
        const auto k = static_cast<KeywordId>(zipf.sample(kw_rng));
        if (std::find(u.keywords.begin(), u.keywords.end(), k) == u.keywords.end()) {
          u.keywords.push_back(k);
          break;
        }
      }
    }
    std::sort(u.keywords.begin(), u.keywords.end());
  }
  return Catalog(std::move(units), opts.keywords, opts.zipf_exponent);
}

Placement seed_initial_storage(const Overlay& overlay, const Catalog& catalog,
                               const StorageOptions& opts, std::uint64_t seed) {
  const std::size_t n = overlay.node_count();
  if (n == 0) throw Error("storage: overlay has no nodes");
  if (!(opts.fill_fraction > 0.0 && opts.fill_fraction <= 1.0)) {
    throw Error("storage: fill_fraction must be in (0, 1]");
  }
  const auto cap = static_cast<Bytes>(
      std::floor(opts.fill_fraction * static_cast<double>(opts.capacity)));
  Rng rng = Rng::substream(seed, "storage.seed");

  Placement p;
  p.origin.assign(catalog.unit_count(), kNoNode);
  p.node_bytes.assign(n, 0);
  p.node_units.assign(n, 0);
  auto place = [&](UnitId u, NodeId node) {
    p.origin[u] = node;
    p.node_bytes[node] += catalog.unit(u).size;
    ++p.node_units[node];
  };

  // Random rank per node, used as the uniform tie-break and as the
  // contribution rank under the power-law model.
  std::vector<NodeId> rank_to_node(n);
  std::iota(rank_to_node.begin(), rank_to_node.end(), 0);
  rng.shuffle(rank_to_node);

  if (opts.contribution == Contribution::uniform) {
    std::vector<std::size_t> tie(n);
    for (std::size_t r = 0; r < n; ++r) tie[rank_to_node[r]] = r;
    // Largest units first, each onto the currently least-filled node.
    std::vector<UnitId> order(catalog.unit_count());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](UnitId a, UnitId b) {
      return catalog.unit(a).size > catalog.unit(b).size;
    });
    using Slot = std::tuple<Bytes, std::size_t, NodeId>;
    std::priority_queue<Slot, std::vector<Slot>, std::greater<>> heap;
    for (NodeId v = 0; v < n; ++v) heap.emplace(0, tie[v], v);
    for (UnitId u : order) {
      auto [fill, t, node] = heap.top();
      heap.pop();
      const Bytes size = catalog.unit(u).size;
      if (fill + size > cap) {
        throw Error("storage: catalog does not fit under the per-node fill cap");
      }
      place(u, node);
      heap.emplace(fill + size, t, node);
    }
    return p;
  }

  const ZipfSampler zipf(n, opts.contribution_exponent);
  std::vector<UnitId> order(catalog.unit_count());
  std::iota(order.begin(), order.end(), 0);
  rng.shuffle(order);
  for (UnitId u : order) {
    const Bytes size = catalog.unit(u).size;
    NodeId chosen = kNoNode;
    for (int attempt = 0; attempt < 64 && chosen == kNoNode; ++attempt) {
      const NodeId node = rank_to_node[zipf.sample(rng)];
      if (p.node_bytes[node] + size <= cap) chosen = node;
    }
    for (std::size_t r = 0; r < n && chosen == kNoNode; ++r) {
      const NodeId node = rank_to_node[r];
      if (p.node_bytes[node] + size <= cap) chosen = node;
    }
    if (chosen == kNoNode) {
      throw Error("storage: catalog does not fit under the per-node fill cap");
    }
    place(u, chosen);
  }
  return p;
}

void write_catalog(std::ostream& out, const Catalog& catalog) {
  for (const Unit& u : catalog.units()) {
    out << u.id << ' ' << u.size << ' ' << u.primary_keyword;
    for (KeywordId k : u.keywords) {
      if (k != u.primary_keyword) out << ',' << k;
    }
    out << '\n';
  }
}

Catalog read_catalog(std::istream& in, double zipf_exponent) {
  std::vector<Unit> units;
  std::size_t keyword_count = 0;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ss(line);
    Unit u;
    std::string kws;
    if (!(ss >> u.id >> u.size >> kws)) throw Error("catalog: malformed line");
    std::istringstream ks(kws);
    std::string tok;
    while (std::getline(ks, tok, ',')) {
      const auto k = static_cast<KeywordId>(std::stoul(tok));
      if (u.keywords.empty()) u.primary_keyword = k;
      u.keywords.push_back(k);
      keyword_count = std::max<std::size_t>(keyword_count, k + 1);
    }
    std::sort(u.keywords.begin(), u.keywords.end());
    units.push_back(std::move(u));
  }
  return Catalog(std::move(units), keyword_count, zipf_exponent);
}

}  // namespace hsim
