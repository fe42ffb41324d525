#include "bhsim/traffic.hpp"

namespace bhsim {

CbrSource::CbrSource(std::uint32_t flow_index, Flow flow, double rate_pps, std::uint32_t payload_bytes)
    : index_(flow_index), flow_(flow), rate_pps_(rate_pps), payload_bytes_(payload_bytes) {}

DataPacket CbrSource::emit(SimTime now) {
  return DataPacket{
      .origin = flow_.src,
      .dest = flow_.dst,
      .pkt_id = next_pkt_id_++,
      .payload_bytes = payload_bytes_,
      .created_at = now,
      .flow = index_,
  };
}

std::vector<SimTime> cbr_schedule(SimTime start, SimTime stop, double rate_pps) {
  std::vector<SimTime> times;
  if (rate_pps <= 0.0) return times;
  for (std::uint64_t k = 0;; ++k) {
    const SimTime t = start + static_cast<double>(k) / rate_pps;
    if (t >= stop) break;
    times.push_back(t);
  }
  return times;
}

}  // namespace bhsim
