#include "hsim/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace hsim {

void MetricsLog::resize(std::size_t nodes, std::size_t units) {
  node_requests_ok.assign(nodes, 0);
  node_requests_failed.assign(nodes, 0);
  presentation_starts.assign(units, 0);
  mean_replicas.assign(units, 0.0);
}

double quantile_sorted(std::span<const double> sorted, double p) {
  if (sorted.empty()) throw Error("quantile of empty sample");
  const double h = (static_cast<double>(sorted.size()) - 1.0) * p;
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  return sorted[lo] + (h - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

BoxStats box_stats(std::vector<double> values) {
  BoxStats b;
  if (values.empty()) return b;
  std::sort(values.begin(), values.end());
  b.count = values.size();
  b.min = values.front();
  b.max = values.back();
  b.q1 = quantile_sorted(values, 0.25);
  b.median = quantile_sorted(values, 0.5);
  b.q3 = quantile_sorted(values, 0.75);
  const double iqr = b.q3 - b.q1;
  b.whisker_low = std::max(b.min, b.q1 - 1.5 * iqr);
  b.whisker_high = std::min(b.max, b.q3 + 1.5 * iqr);
  b.outliers = static_cast<std::size_t>(std::count_if(
      values.begin(), values.end(),
      [&](double v) { return v < b.whisker_low || v > b.whisker_high; }));
  b.mean = std::accumulate(values.begin(), values.end(), 0.0) /
           static_cast<double>(values.size());
  return b;
}

double steps_to_seconds(Step steps, double dt) {
  return std::round(static_cast<double>(steps) * dt * 1e9) / 1e9;
}

std::vector<CdfPoint> delay_cdf(const MetricsLog& log) {
  if (log.delays.empty()) throw Error("delay_cdf: no delay samples");
  std::vector<Step> d;
  d.reserve(log.delays.size());
  for (const auto& s : log.delays) d.push_back(s.delay_steps);
  std::sort(d.begin(), d.end());
  std::vector<CdfPoint> out;
  const double n = static_cast<double>(d.size());
  for (std::size_t i = 0; i < d.size(); ++i) {
    if (i + 1 < d.size() && d[i + 1] == d[i]) continue;
    out.push_back(CdfPoint{steps_to_seconds(d[i], log.dt),
                           static_cast<double>(i + 1) / n});
  }
  return out;
}

FailureRates failure_rates(const MetricsLog& log) {
  const std::uint64_t terminal = log.slots_fulfilled + log.slots_missed;
  if (terminal == 0) throw Error("failure_rates: no terminal slots");
  FailureRates r;
  r.deadline_missed_rate =
      static_cast<double>(log.slots_missed) / static_cast<double>(terminal);
  std::vector<double> per_node;
  for (std::size_t v = 0; v < log.node_requests_ok.size(); ++v) {
    const auto total = log.node_requests_ok[v] + log.node_requests_failed[v];
    if (total == 0) continue;
    per_node.push_back(static_cast<double>(log.node_requests_failed[v]) /
                       static_cast<double>(total));
  }
  r.request_failed_rate = box_stats(std::move(per_node));
  return r;
}

std::vector<double> utilization_values(const MetricsLog& log) {
  std::vector<double> out(log.presentation_starts.size(), 0.0);
  for (std::size_t u = 0; u < out.size(); ++u) {
    const double replicas = log.mean_replicas[u];
    if (replicas > 0.0) {
      out[u] = static_cast<double>(log.presentation_starts[u]) / replicas;
    }
  }
  return out;
}

BoxStats utilization(const MetricsLog& log) {
  return box_stats(utilization_values(log));
}

double mean_delay_s(const MetricsLog& log) {
  if (log.delays.empty()) return 0.0;
  double total = 0.0;
  for (const auto& s : log.delays) total += static_cast<double>(s.delay_steps);
  return total / static_cast<double>(log.delays.size()) * log.dt;
}

double median_delay_s(const MetricsLog& log) {
  if (log.delays.empty()) return 0.0;
  std::vector<double> d;
  d.reserve(log.delays.size());
  for (const auto& s : log.delays) d.push_back(static_cast<double>(s.delay_steps));
  std::sort(d.begin(), d.end());
  return quantile_sorted(d, 0.5) * log.dt;
}

std::size_t cleanup_failures(const MetricsLog& log) {
  return static_cast<std::size_t>(std::count_if(
      log.cleanups.begin(), log.cleanups.end(),
      [](const CleanupReport& r) { return r.failed; }));
}

}  // namespace hsim
