#include "bhsim/metrics.hpp"

#include <algorithm>
#include <map>
#include <stdexcept>
#include <utility>

namespace bhsim {

FlowMetrics& FlowMetrics::operator+=(const FlowMetrics& o) {
  originated += o.originated;
  delivered += o.delivered;
  absorbed += o.absorbed;
  no_route_drops += o.no_route_drops;
  buffer_drops += o.buffer_drops;
  in_flight_at_end += o.in_flight_at_end;
  bytes_delivered += o.bytes_delivered;
  return *this;
}

PdrValue compute_pdr(const FlowMetrics& m) {
  if (m.originated == 0) return PdrValue{1.0, true};
  return PdrValue{static_cast<double>(m.delivered) / static_cast<double>(m.originated), false};
}

double compute_throughput(const FlowMetrics& m, double duration) {
  if (!(duration > 0.0)) throw std::invalid_argument("throughput needs a positive duration");
  return static_cast<double>(m.bytes_delivered) / duration;
}

void finalize_metrics(MetricsRecord& record) {
  record.pdr = compute_pdr(record.totals).value;
  record.throughput_bps = compute_throughput(record.totals, record.duration);
}

std::string_view mode_name(Mode mode) {
  switch (mode) {
    case Mode::clean:
      return "clean";
    case Mode::attack:
      return "attack";
    case Mode::attack_detection:
      return "attack+detection";
  }
  return "?";
}

Mode parse_mode(std::string_view name) {
  if (name == "clean") return Mode::clean;
  if (name == "attack") return Mode::attack;
  if (name == "attack+detection") return Mode::attack_detection;
  throw std::invalid_argument("unknown mode '" + std::string(name) + "'");
}

namespace {

struct Accumulator {
  std::size_t n = 0;
  double sum = 0.0;
  double lo = 0.0;
  double hi = 0.0;

  void add(double v) {
    lo = n == 0 ? v : std::min(lo, v);
    hi = n == 0 ? v : std::max(hi, v);
    sum += v;
    ++n;
  }
  Summary summary() const { return Summary{sum / static_cast<double>(n), lo, hi}; }
};

}  // namespace

std::vector<SweepRow> aggregate_sweep(const std::vector<SweepRecord>& records) {
  if (records.empty()) throw std::invalid_argument("aggregate_sweep needs at least one record");

  std::map<std::pair<double, Mode>, std::pair<Accumulator, Accumulator>> cells;
  for (const SweepRecord& r : records) {
    auto& [pdr, thr] = cells[{r.speed, r.mode}];
    pdr.add(r.metrics.pdr);
    thr.add(r.metrics.throughput_bps);
  }

  std::vector<SweepRow> rows;
  rows.reserve(cells.size());
  for (const auto& [key, acc] : cells) {
    rows.push_back(SweepRow{
        .speed = key.first,
        .mode = key.second,
        .runs = acc.first.n,
        .pdr = acc.first.summary(),
        .throughput_bps = acc.second.summary(),
    });
  }
  return rows;
}

}  // namespace bhsim
