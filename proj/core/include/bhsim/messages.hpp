#pragma once

#include <cstdint>
#include <optional>
#include <set>
#include <string_view>
#include <variant>

#include "bhsim/types.hpp"

namespace bhsim {

/// Two-bit data routing history a node keeps about one peer.
struct DriEntry {
  bool from = false;     ///< owner has routed data packets received from the peer
  bool through = false;  ///< owner has routed data packets through the peer (confirmed)

  friend constexpr bool operator==(const DriEntry&, const DriEntry&) = default;
};

struct Rreq {
  NodeId origin;
  SeqNum origin_seq = 0;
  std::uint64_t broadcast_id = 0;
  NodeId dest;
  SeqNum dest_seq_known = 0;
  std::uint32_t hop_count = 0;
};

/// Route reply. `origin` names the discovery originator the reply travels back to.
/// Intermediate generators disclose their next hop toward `dest` and their DRI
/// entry for it so the originator can cross-check the claim.
struct Rrep {
  NodeId origin;
  NodeId dest;
  SeqNum dest_seq = 0;
  std::uint32_t hop_count = 0;
  NodeId generator;
  std::optional<NodeId> responder_next_hop;
  std::optional<DriEntry> responder_dri_for_nhn;
};

/// Further request: asks `target` what it knows about `suspect`.
struct Frq {
  NodeId asker;
  NodeId suspect;
  NodeId target;
  NodeId dest;
};

/// Further reply from the queried target back to the asker.
struct Frp {
  NodeId responder;
  NodeId asker;
  NodeId dest;
  DriEntry dri_for_suspect;
  std::optional<NodeId> responder_next_hop;
  std::optional<DriEntry> dri_for_responder_next_hop;
};

struct Alarm {
  NodeId reporter;
  std::set<NodeId> black_holes;
  std::uint64_t alarm_id = 0;
};

/// Flow index used for warm-up traffic, which never reaches the metrics.
inline constexpr std::uint32_t kWarmupFlow = 0xffffffffu;

struct DataPacket {
  NodeId origin;
  NodeId dest;
  std::uint64_t pkt_id = 0;
  std::uint32_t payload_bytes = 512;
  SimTime created_at = 0.0;
  std::uint32_t flow = 0;
  std::uint32_t hops = 0;  ///< hops travelled so far; bounds forwarding loops

  bool is_warmup() const { return flow == kWarmupFlow; }
};

using Message = std::variant<Rreq, Rrep, Frq, Frp, Alarm, DataPacket>;

std::string_view message_kind(const Message& msg);

}  // namespace bhsim
