#include "bhsim/trace.hpp"

#include <fmt/format.h>

#include <iterator>

namespace bhsim {

std::string format_trace_line(const TraceEvent& e) {
  std::string line = fmt::format("t={:.6f} ev={} node={}", e.t, e.ev, e.node);
  auto out = std::back_inserter(line);
  if (e.from) fmt::format_to(out, " from={}", *e.from);
  if (e.dst) fmt::format_to(out, " dst={}", *e.dst);
  if (e.pkt) fmt::format_to(out, " pkt={}", *e.pkt);
  if (!e.detail.empty()) fmt::format_to(out, " detail={}", e.detail);
  return line;
}

void write_trace(std::ostream& out, const std::vector<TraceEvent>& events) {
  for (const TraceEvent& e : events) out << format_trace_line(e) << '\n';
}

}  // namespace bhsim
