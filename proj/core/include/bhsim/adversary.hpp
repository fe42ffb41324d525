#pragma once

// Black-hole behaviour: answers every route request at once with a forged,
// inflated sequence number, never rebroadcasts, and swallows all data that is
// not addressed to it. In cooperative mode members vouch for each other when
// a cross-check queries them.

#include <cstdint>
#include <optional>
#include <set>
#include <span>
#include <utility>

#include "bhsim/messages.hpp"
#include "bhsim/rng.hpp"

namespace bhsim {

struct BlackHoleConfig {
  bool enabled = false;
  std::set<NodeId> members;
  SeqNum seq_inflation = 100;
  std::uint32_t advertised_hop_count = 1;
  SimTime respond_delay_seconds = 0.0;
  bool cooperative = false;

  bool is_member(NodeId id) const { return enabled && members.contains(id); }
};

/// Forged reply. The routing table is never consulted.
Rrep blackhole_handle_rreq(const BlackHoleConfig& cfg, NodeId self, const Rreq& rreq,
                           std::optional<NodeId> fabricated_next_hop);

/// Next hop a black hole claims to have: a fellow member among its neighbours
/// in cooperative mode, otherwise a uniformly drawn honest neighbour other than
/// `avoid`.
std::optional<NodeId> fabricate_next_hop(const BlackHoleConfig& cfg, NodeId self, std::span<const NodeId> neighbors,
                                         std::set<NodeId> avoid, Rng& rng);

/// Cooperative members vouch (1,1) for a fellow member and name a fabricated
/// onward hop; otherwise the answer comes from the black hole's empty history.
Frp blackhole_handle_frq(const BlackHoleConfig& cfg, NodeId self, const Frq& frq,
                         std::optional<NodeId> fabricated_onward);

class BlackHoleState {
 public:
  /// Data that reached a black hole which is not its destination.
  void absorb(const DataPacket& pkt);

  /// True the first time a flood (origin, broadcast_id) is heard.
  bool first_sighting(const Rreq& rreq) { return seen_.insert({rreq.origin, rreq.broadcast_id}).second; }

  std::uint64_t absorbed() const { return absorbed_; }
  std::uint64_t forged_replies() const { return forged_; }
  void note_forged_reply() { ++forged_; }

 private:
  std::uint64_t absorbed_ = 0;
  std::uint64_t forged_ = 0;
  std::set<std::pair<NodeId, std::uint64_t>> seen_;
};

}  // namespace bhsim
