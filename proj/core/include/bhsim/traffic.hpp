#pragma once

#include <cstdint>
#include <vector>

#include "bhsim/messages.hpp"

namespace bhsim {

struct Flow {
  NodeId src;
  NodeId dst;

  friend constexpr auto operator<=>(const Flow&, const Flow&) = default;
};

/// Constant-bit-rate source: one packet every 1/rate_pps seconds in [start, stop).
class CbrSource {
 public:
  CbrSource(std::uint32_t flow_index, Flow flow, double rate_pps, std::uint32_t payload_bytes);

  DataPacket emit(SimTime now);
  SimTime interval() const { return 1.0 / rate_pps_; }
  std::uint64_t emitted() const { return next_pkt_id_; }
  const Flow& flow() const { return flow_; }

 private:
  std::uint32_t index_;
  Flow flow_;
  double rate_pps_;
  std::uint32_t payload_bytes_;
  std::uint64_t next_pkt_id_ = 0;
};

/// Emission times of a CBR source, computed without floating-point drift.
std::vector<SimTime> cbr_schedule(SimTime start, SimTime stop, double rate_pps);

}  // namespace bhsim
