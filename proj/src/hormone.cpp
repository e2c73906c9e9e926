#include "hsim/hormone.hpp"

#include <algorithm>
#include <charconv>
#include <ostream>
#include <string>

namespace hsim {

void ParameterSet::validate() const {
  auto fail = [](const std::string& what) { throw Error("parameters: " + what); };
  if (!(alpha >= 0.0 && alpha <= 1.0)) fail("alpha must be in [0, 1]");
  if (!(eta0 >= 0.0)) fail("eta0 must be >= 0");
  if (!(eta >= 0.0)) fail("eta must be >= 0");
  if (!(epsilon >= 0.0)) fail("epsilon must be >= 0");
  if (!(m >= 0.0)) fail("m must be >= 0");
  if (!(t >= 0.0)) fail("t must be >= 0");
  if (!(c > 0.0 && c <= 1.0)) fail("c must be in (0, 1]");
  if (maxhops < 1) fail("maxhops must be >= 1");
}

namespace {

auto lower(std::vector<HormoneField::Entry>& v, NodeId node) {
  return std::lower_bound(
      v.begin(), v.end(), node,
      [](const HormoneField::Entry& e, NodeId id) { return e.node < id; });
}

}  // namespace

HormoneField::HormoneField(std::size_t nodes, std::size_t keywords)
    : nodes_(nodes),
      by_keyword_(keywords),
      scratch_(nodes, 0.0),
      marked_(nodes, 0),
      dense_(nodes * keywords, 0.0),
      by_node_(nodes) {}

double HormoneField::level(NodeId node, KeywordId keyword) const {
  if (node >= nodes_ || keyword >= by_keyword_.size()) {
    throw Error("hormone: level lookup out of range");
  }
  return dense_[cell(node, keyword)];
}

void HormoneField::deposit(const Overlay& overlay, NodeId node,
                           KeywordId keyword, double amount) {
  if (!(amount >= 0.0)) throw Error("hormone: deposit amount must be >= 0");
  if (!overlay.alive(node)) {
    throw Error("hormone: deposit on removed node " + std::to_string(node));
  }
  if (amount == 0.0) return;
  auto& v = by_keyword_.at(keyword);
  auto it = lower(v, node);
  if (it != v.end() && it->node == node) {
    it->level += amount;
    dense_[cell(node, keyword)] = it->level;
  } else {
    v.insert(it, Entry{node, amount});
    dense_[cell(node, keyword)] = amount;
  }
  touch();
}

void HormoneField::raise_open_requests(const Overlay& overlay,
                                       std::span<const HormoneSlot> open_slots,
                                       double eta) {
  for (const HormoneSlot& s : open_slots) deposit(overlay, s.node, s.keyword, eta);
}

void HormoneField::diffuse(const Overlay& overlay, double alpha,
                           const Residence& residence) {
  if (alpha == 0.0) return;
  for (KeywordId k = 0; k < by_keyword_.size(); ++k) {
    auto& entries = by_keyword_[k];
    if (entries.empty()) continue;
    touched_.clear();
    auto add = [&](NodeId node, double amount) {
      if (!marked_[node]) {
        marked_[node] = 1;
        touched_.push_back(node);
        scratch_[node] = 0.0;
      }
      scratch_[node] += amount;
    };
    for (const Entry& e : entries) {
      double bw_total = 0.0;
      overlay.for_each_alive_link(e.node, [&](const Link& l) { bw_total += l.bandwidth_bps; });
      if (bw_total == 0.0 || (residence && residence(e.node, k))) {
        add(e.node, e.level);
        continue;
      }
      const double outflow = alpha * e.level;
      add(e.node, e.level - outflow);
      overlay.for_each_alive_link(e.node, [&](const Link& l) {
        add(l.to, outflow * (l.bandwidth_bps / bw_total));
      });
    }
    std::sort(touched_.begin(), touched_.end());
    for (const Entry& e : entries) dense_[cell(e.node, k)] = 0.0;
    entries.clear();
    for (NodeId node : touched_) {
      marked_[node] = 0;
      if (scratch_[node] > 0.0) {
        entries.push_back(Entry{node, scratch_[node]});
        dense_[cell(node, k)] = scratch_[node];
      }
    }
  }
  touch();
}

void HormoneField::evaporate(double epsilon, double t) {
  for (KeywordId k = 0; k < by_keyword_.size(); ++k) {
    auto& entries = by_keyword_[k];
    if (entries.empty()) continue;
    std::size_t out = 0;
    for (const Entry& e : entries) {
      double v = std::max(e.level - epsilon, 0.0);
      if (!(v > 0.0 && v >= t)) v = 0.0;
      dense_[cell(e.node, k)] = v;
      if (v > 0.0) entries[out++] = Entry{e.node, v};
    }
    entries.resize(out);
  }
  touch();
}

std::vector<std::pair<NodeId, double>> HormoneField::gradient(
    const Overlay& overlay, NodeId node, KeywordId keyword) const {
  std::vector<std::pair<NodeId, double>> out;
  const double own = level(node, keyword);
  overlay.for_each_alive_link(node, [&](const Link& l) {
    out.emplace_back(l.to, level(l.to, keyword) - own);
  });
  std::stable_sort(out.begin(), out.end(), [](const auto& a, const auto& b) {
    return a.second > b.second;
  });
  return out;
}

void HormoneField::rebuild_node_index() const {
  for (auto& v : by_node_) v.clear();
  for (KeywordId k = 0; k < by_keyword_.size(); ++k) {
    for (const Entry& e : by_keyword_[k]) by_node_[e.node].emplace_back(k, e.level);
  }
  node_index_valid_ = true;
}

const std::vector<std::pair<KeywordId, double>>& HormoneField::node_levels(
    NodeId node) const {
  if (!node_index_valid_) rebuild_node_index();
  return by_node_.at(node);
}

void HormoneField::clear_node(NodeId node) {
  for (KeywordId k = 0; k < by_keyword_.size(); ++k) {
    auto& entries = by_keyword_[k];
    auto it = lower(entries, node);
    if (it != entries.end() && it->node == node) entries.erase(it);
    dense_[cell(node, k)] = 0.0;
  }
  touch();
}

double HormoneField::total_mass() const {
  double total = 0.0;
  for (const auto& entries : by_keyword_) {
    for (const Entry& e : entries) total += e.level;
  }
  return total;
}

void HormoneField::dump_csv(std::ostream& out, Step step) const {
  for (KeywordId k = 0; k < by_keyword_.size(); ++k) {
    for (const Entry& e : by_keyword_[k]) {
      char buf[32];
      const auto res = std::to_chars(buf, buf + sizeof buf, e.level);
      out << step << ',' << e.node << ',' << k << ',' << std::string_view(buf, res.ptr - buf)
          << '\n';
    }
  }
}

}  // namespace hsim
