#include "hsim/scenario_io.hpp"

#include <charconv>
#include <fstream>
#include <functional>
#include <istream>
#include <ostream>
#include <sstream>

namespace hsim {

std::string format_double(double v) {
  char buf[400];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  std::string shortest(buf, res.ptr);
  if (shortest.find('e') == std::string::npos) return shortest;
  // Plain digits for values like 1e+08 when that is still compact.
  res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::fixed);
  if (res.ec == std::errc() && res.ptr - buf <= 20) return std::string(buf, res.ptr);
  return shortest;
}

namespace {

std::string_view trim(std::string_view s) {
  const auto ws = " \t\r\n";
  const auto b = s.find_first_not_of(ws);
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(ws);
  return s.substr(b, e - b + 1);
}

[[noreturn]] void bad_value(std::string_view key, std::string_view value) {
  throw Error("scenario: bad value '" + std::string(value) + "' for key '" +
              std::string(key) + "'");
}

double to_double(std::string_view key, std::string_view v) {
  double out = 0.0;
  auto res = std::from_chars(v.data(), v.data() + v.size(), out);
  if (res.ec != std::errc() || res.ptr != v.data() + v.size()) bad_value(key, v);
  return out;
}

template <typename Int>
Int to_int(std::string_view key, std::string_view v) {
  Int out{};
  auto res = std::from_chars(v.data(), v.data() + v.size(), out);
  if (res.ec != std::errc() || res.ptr != v.data() + v.size()) bad_value(key, v);
  return out;
}

bool to_bool(std::string_view key, std::string_view v) {
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  bad_value(key, v);
}

std::string bool_text(bool b) { return b ? "true" : "false"; }

std::string churn_events_text(const std::vector<ChurnEvent>& events) {
  std::string out;
  for (const ChurnEvent& e : events) {
    if (!out.empty()) out += ',';
    out += std::to_string(e.step) + ':' + std::to_string(e.node);
  }
  return out;
}

std::vector<ChurnEvent> parse_churn_events(std::string_view key, std::string_view v) {
  std::vector<ChurnEvent> out;
  while (!v.empty()) {
    const auto comma = v.find(',');
    const std::string_view item = trim(v.substr(0, comma));
    v = comma == std::string_view::npos ? std::string_view{} : v.substr(comma + 1);
    if (item.empty()) continue;
    const auto colon = item.find(':');
    if (colon == std::string_view::npos) bad_value(key, item);
    out.push_back(ChurnEvent{to_int<Step>(key, trim(item.substr(0, colon))),
                             to_int<NodeId>(key, trim(item.substr(colon + 1)))});
  }
  return out;
}

struct Key {
  std::string_view name;
  std::function<void(Scenario&, std::string_view, std::string_view)> set;
  std::function<std::string(const Scenario&)> get;
};

#define HS_DOUBLE(name, field)                                                       \
  Key {                                                                              \
    name, [](Scenario& s, std::string_view k, std::string_view v) { s.field = to_double(k, v); }, \
        [](const Scenario& s) { return format_double(s.field); }                     \
  }
#define HS_INT(name, field)                                                          \
  Key {                                                                              \
    name,                                                                            \
        [](Scenario& s, std::string_view k, std::string_view v) {                    \
          s.field = to_int<decltype(s.field)>(k, v);                                 \
        },                                                                           \
        [](const Scenario& s) { return std::to_string(s.field); }                    \
  }
#define HS_BOOL(name, field)                                                         \
  Key {                                                                              \
    name, [](Scenario& s, std::string_view k, std::string_view v) { s.field = to_bool(k, v); }, \
        [](const Scenario& s) { return bool_text(s.field); }                         \
  }

const std::vector<Key>& keys() {
  static const std::vector<Key> table = {
      {"name", [](Scenario& s, std::string_view, std::string_view v) { s.name = v; },
       [](const Scenario& s) { return s.name; }},
      {"topology",
       [](Scenario& s, std::string_view k, std::string_view v) {
         if (v == "random") {
           s.topology = TopologyKind::random;
         } else if (v == "powerlaw") {
           s.topology = TopologyKind::powerlaw;
         } else {
           bad_value(k, v);
         }
       },
       [](const Scenario& s) {
         return std::string(s.topology == TopologyKind::random ? "random" : "powerlaw");
       }},
      // nodes, bandwidth and jitter apply to both generators.
      {"nodes",
       [](Scenario& s, std::string_view k, std::string_view v) {
         s.random.nodes = s.powerlaw.nodes = to_int<std::size_t>(k, v);
       },
       [](const Scenario& s) { return std::to_string(s.node_count()); }},
      HS_DOUBLE("edge_probability", random.edge_probability),
      HS_INT("target_edges", powerlaw.target_edges),
      HS_INT("rewire_steps", powerlaw.rewire_steps),
      {"bandwidth_bps",
       [](Scenario& s, std::string_view k, std::string_view v) {
         s.random.bandwidth_bps = s.powerlaw.bandwidth_bps = to_double(k, v);
       },
       [](const Scenario& s) { return format_double(s.bandwidth_bps()); }},
      {"bandwidth_jitter",
       [](Scenario& s, std::string_view k, std::string_view v) {
         s.random.bandwidth_jitter = s.powerlaw.bandwidth_jitter = to_double(k, v);
       },
       [](const Scenario& s) {
         return format_double(s.topology == TopologyKind::random
                                  ? s.random.bandwidth_jitter
                                  : s.powerlaw.bandwidth_jitter);
       }},
      HS_INT("units", catalog.units),
      HS_INT("keywords", catalog.keywords),
      HS_DOUBLE("zipf_exponent", catalog.zipf_exponent),
      HS_INT("size_mean", catalog.sizes.mean),
      HS_INT("size_min", catalog.sizes.min),
      HS_INT("size_max", catalog.sizes.max),
      HS_DOUBLE("size_log_sigma", catalog.sizes.log_sigma),
      HS_INT("max_secondary_keywords", catalog.max_secondary_keywords),
      HS_DOUBLE("fill_fraction", storage.fill_fraction),
      HS_INT("capacity", storage.capacity),
      {"contribution",
       [](Scenario& s, std::string_view k, std::string_view v) {
         if (v == "uniform") {
           s.storage.contribution = Contribution::uniform;
         } else if (v == "powerlaw") {
           s.storage.contribution = Contribution::powerlaw;
         } else {
           bad_value(k, v);
         }
       },
       [](const Scenario& s) {
         return std::string(s.storage.contribution == Contribution::uniform ? "uniform"
                                                                             : "powerlaw");
       }},
      HS_DOUBLE("contribution_exponent", storage.contribution_exponent),
      HS_DOUBLE("eta0", params.eta0),
      HS_DOUBLE("eta", params.eta),
      HS_DOUBLE("alpha", params.alpha),
      HS_DOUBLE("epsilon", params.epsilon),
      HS_DOUBLE("m", params.m),
      HS_DOUBLE("c", params.c),
      HS_DOUBLE("t", params.t),
      HS_INT("maxhops", params.maxhops),
      {"replication",
       [](Scenario& s, std::string_view, std::string_view v) {
         s.replication = parse_replication(v);
       },
       [](const Scenario& s) { return std::string(to_string(s.replication)); }},
      HS_DOUBLE("rank_threshold", rank_threshold),
      {"cleanup",
       [](Scenario& s, std::string_view, std::string_view v) { s.cleanup = parse_cleanup(v); },
       [](const Scenario& s) { return std::string(to_string(s.cleanup)); }},
      HS_INT("max_keywords_per_request", requests.max_keywords_per_request),
      HS_DOUBLE("taste_prob", requests.taste_prob),
      HS_DOUBLE("playback_bps", requests.playback_bps),
      HS_INT("churn_nodes", churn_nodes),
      {"churn_events",
       [](Scenario& s, std::string_view k, std::string_view v) {
         s.churn_events = parse_churn_events(k, v);
       },
       [](const Scenario& s) { return churn_events_text(s.churn_events); }},
      HS_INT("duration", duration),
      HS_DOUBLE("dt", dt),
      HS_INT("seed", seed),
      HS_INT("transit_buffer", transit_buffer),
      HS_INT("transit_timeout", transit_timeout),
      HS_BOOL("trace_transfers", trace_transfers),
      HS_BOOL("trace_slots", trace_slots),
      HS_BOOL("trace_hormone", trace_hormone),
  };
  return table;
}

#undef HS_DOUBLE
#undef HS_INT
#undef HS_BOOL

}  // namespace

const std::vector<std::string>& preset_names() {
  static const std::vector<std::string> names{"tiny10", "random50", "scalefree1000"};
  return names;
}

Scenario preset_scenario(std::string_view name) {
  if (name == "tiny10") return scenario_tiny();
  if (name == "random50") return scenario_random50();
  if (name == "scalefree1000") return scenario_scalefree1000();
  throw Error("scenario: unknown preset '" + std::string(name) + "'");
}

void apply_setting(Scenario& scenario, std::string_view key, std::string_view value) {
  key = trim(key);
  value = trim(value);
  if (key == "preset") {
    scenario = preset_scenario(value);
    return;
  }
  for (const Key& k : keys()) {
    if (k.name == key) {
      k.set(scenario, key, value);
      return;
    }
  }
  throw Error("scenario: unknown key '" + std::string(key) + "'");
}

void apply_override(Scenario& scenario, std::string_view assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string_view::npos) {
    throw Error("scenario: override '" + std::string(assignment) + "' is not key=value");
  }
  apply_setting(scenario, assignment.substr(0, eq), assignment.substr(eq + 1));
}

Scenario read_scenario(std::istream& in, const std::string& source) {
  Scenario s;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::string_view v = line;
    if (const auto hash = v.find('#'); hash != std::string_view::npos) v = v.substr(0, hash);
    v = trim(v);
    if (v.empty()) continue;
    const auto eq = v.find('=');
    if (eq == std::string_view::npos) {
      throw Error(source + ":" + std::to_string(lineno) + ": expected key = value");
    }
    try {
      apply_setting(s, v.substr(0, eq), v.substr(eq + 1));
    } catch (const Error& e) {
      throw Error(source + ":" + std::to_string(lineno) + ": " + e.what());
    }
  }
  return s;
}

Scenario load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open scenario file '" + path + "'");
  return read_scenario(in, path);
}

std::vector<std::pair<std::string, std::string>> scenario_settings(const Scenario& scenario) {
  std::vector<std::pair<std::string, std::string>> out;
  for (const Key& k : keys()) out.emplace_back(std::string(k.name), k.get(scenario));
  return out;
}

void write_scenario(std::ostream& out, const Scenario& scenario) {
  for (const auto& [k, v] : scenario_settings(scenario)) out << k << " = " << v << '\n';
}

}  // namespace hsim
