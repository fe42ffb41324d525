#pragma once

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "bhsim/types.hpp"

namespace bhsim {

/// One executed simulator event, in execution order.
struct TraceEvent {
  SimTime t = 0.0;
  std::string ev;
  NodeId node;
  std::optional<NodeId> from;
  std::optional<NodeId> dst;
  std::optional<std::uint64_t> pkt;
  std::string detail;  ///< comma-separated k:v pairs, empty when absent

  friend bool operator==(const TraceEvent&, const TraceEvent&) = default;
};

/// `t=<s.6f> ev=<kind> node=<id> [from=<id>] [dst=<id>] [pkt=<id>] [detail=<k:v,...>]`
std::string format_trace_line(const TraceEvent& e);

void write_trace(std::ostream& out, const std::vector<TraceEvent>& events);

}  // namespace bhsim
