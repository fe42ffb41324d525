#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "bhsim/types.hpp"

namespace bhsim {

struct FlowMetrics {
  std::uint64_t originated = 0;
  std::uint64_t delivered = 0;
  std::uint64_t absorbed = 0;
  std::uint64_t no_route_drops = 0;
  std::uint64_t buffer_drops = 0;
  std::uint64_t in_flight_at_end = 0;
  std::uint64_t bytes_delivered = 0;

  /// originated == delivered + absorbed + no_route + buffer + in_flight
  bool conserved() const {
    return originated == delivered + absorbed + no_route_drops + buffer_drops + in_flight_at_end;
  }
  FlowMetrics& operator+=(const FlowMetrics& o);
  friend bool operator==(const FlowMetrics&, const FlowMetrics&) = default;
};

struct MetricsRecord {
  FlowMetrics totals;
  double duration = 0.0;
  double pdr = 1.0;
  double throughput_bps = 0.0;  ///< application payload bytes per second
  std::vector<FlowMetrics> per_flow;

  friend bool operator==(const MetricsRecord&, const MetricsRecord&) = default;
};

struct PdrValue {
  double value = 1.0;
  bool vacuous = false;  ///< nothing was originated
};

PdrValue compute_pdr(const FlowMetrics& m);
/// Throws std::invalid_argument when duration <= 0.
double compute_throughput(const FlowMetrics& m, double duration);

/// Fills pdr and throughput from the counters.
void finalize_metrics(MetricsRecord& record);

enum class Mode { clean, attack, attack_detection };

std::string_view mode_name(Mode mode);
/// Throws std::invalid_argument for unknown names.
Mode parse_mode(std::string_view name);

struct SweepRecord {
  double speed = 0.0;
  Mode mode = Mode::clean;
  std::uint64_t seed = 0;
  MetricsRecord metrics;
};

struct Summary {
  double mean = 0.0;
  double min = 0.0;
  double max = 0.0;
};

struct SweepRow {
  double speed = 0.0;
  Mode mode = Mode::clean;
  std::size_t runs = 0;
  Summary pdr;
  Summary throughput_bps;
};

/// Per (speed, mode) mean/min/max across seeds, ordered by speed then mode.
/// Throws std::invalid_argument on empty input.
std::vector<SweepRow> aggregate_sweep(const std::vector<SweepRecord>& records);

}  // namespace bhsim
