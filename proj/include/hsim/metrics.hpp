#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "hsim/types.hpp"

namespace hsim {

struct DelaySample {
  Step step = 0;         // step at which the slot became terminal
  Step delay_steps = 0;  // arrival - issue, or deadline - issue when missed
  bool missed = false;
};

struct SlotEvent {
  NodeId user = 0;
  KeywordId keyword = 0;
  Step issued_at = 0;
  bool missed = false;
  Step delay_steps = 0;
};

struct TransferTrace {
  std::uint64_t journey_id = 0;
  UnitId unit = 0;
  NodeId from = 0;
  NodeId to = 0;
  Step start_step = 0;
  Step end_step = 0;
  int hop_index = 0;
};

struct CleanupReport {
  NodeId node = 0;
  Step step = 0;
  std::vector<UnitId> deleted;
  Bytes bytes_freed = 0;
  bool failed = false;
  double fill_before = 0.0;
  double fill_after = 0.0;
};

struct TransportCounters {
  std::uint64_t started = 0;
  std::uint64_t committed = 0;
  std::uint64_t retained = 0;     // source copies kept by the replication rule
  std::uint64_t duplicates = 0;   // destination already held the unit
  std::uint64_t parked = 0;
  std::uint64_t dropped = 0;      // churn or dead destination
  std::uint64_t failed = 0;       // transit buffer full or parking timed out
};

// Append-only record of one run.
struct MetricsLog {
  double dt = 0.1;
  Step steps = 0;
  std::vector<DelaySample> delays;
  std::vector<std::uint64_t> node_requests_ok;      // terminal, not failed
  std::vector<std::uint64_t> node_requests_failed;  // every slot missed
  std::vector<std::uint64_t> presentation_starts;   // per unit
  std::vector<double> mean_replicas;                // per unit, whole run
  std::vector<CleanupReport> cleanups;
  std::vector<SlotEvent> slot_events;               // only when traced
  std::vector<TransferTrace> transfers;             // only when traced
  TransportCounters transport;
  std::uint64_t slots_fulfilled = 0;
  std::uint64_t slots_missed = 0;
  std::uint64_t requests_issued = 0;
  std::uint64_t nodes_removed = 0;
  std::uint64_t units_lost = 0;  // units with no replica left at the end

  void resize(std::size_t nodes, std::size_t units);
};

// Box-plot summary. Quartiles use linear interpolation between closest
// ranks; whiskers sit 1.5 IQR beyond the quartiles, clamped to the data.
struct BoxStats {
  double min = 0.0;
  double q1 = 0.0;
  double median = 0.0;
  double q3 = 0.0;
  double max = 0.0;
  double whisker_low = 0.0;
  double whisker_high = 0.0;
  std::size_t outliers = 0;
  double mean = 0.0;
  std::size_t count = 0;
};

inline constexpr const char* kQuartileMethod = "linear interpolation (type 7)";

// Quantile with linear interpolation between closest ranks of sorted data.
double quantile_sorted(std::span<const double> sorted, double p);
BoxStats box_stats(std::vector<double> values);

// Step count in seconds, rounded to the nanosecond so 53 steps of 0.1 s
// print as 5.3.
double steps_to_seconds(Step steps, double dt);

struct CdfPoint {
  double delay_s;
  double fraction;
};

// Empirical CDF of slot delays in seconds; missed slots enter at their
// maximum delay. Throws on an empty log.
std::vector<CdfPoint> delay_cdf(const MetricsLog& log);

struct FailureRates {
  double deadline_missed_rate = 0.0;
  BoxStats request_failed_rate;  // per-node failed / terminal requests
};
FailureRates failure_rates(const MetricsLog& log);

// Per-unit presentation starts over time-averaged replica count.
BoxStats utilization(const MetricsLog& log);
std::vector<double> utilization_values(const MetricsLog& log);

// Convenience scalars used by summaries and comparisons.
double mean_delay_s(const MetricsLog& log);
double median_delay_s(const MetricsLog& log);
std::size_t cleanup_failures(const MetricsLog& log);

}  // namespace hsim
