#pragma once

// Per-node AODV route discovery: routing table, RREQ flooding, RREP
// generation/selection and hop-by-hop data forwarding. The node never talks to
// the radio itself; every handler returns what should be transmitted and the
// simulation engine carries it out.

#include <cstddef>
#include <cstdint>
#include <deque>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <utility>
#include <variant>
#include <vector>

#include "bhsim/messages.hpp"

namespace bhsim {

struct RoutingTableEntry {
  NodeId dest;
  NodeId next_hop;
  std::uint32_t hop_count = 0;
  SeqNum dest_seq = 0;
  bool valid = false;
  /// Node whose RREQ or RREP produced this entry (used to purge forged routes).
  NodeId generator;

  friend bool operator==(const RoutingTableEntry&, const RoutingTableEntry&) = default;
};

/// Freshness ordering: strictly newer sequence number, or equal sequence number
/// and strictly fewer hops. An invalid existing entry is replaced by any
/// candidate whose sequence number is at least as new.
bool is_better_route(const RoutingTableEntry& candidate, const RoutingTableEntry* existing);

inline constexpr std::size_t kPendingBufferCap = 64;

struct AodvOptions {
  bool gratuitous_rrep = false;
  std::size_t pending_cap = kPendingBufferCap;
};

// handle_rreq outcomes
struct RreqDuplicate {};
struct RreqRebroadcast {
  Rreq rreq;
};
struct RreqReply {
  Rrep rrep;
  NodeId to;
  /// Reply toward the destination when gratuitous replies are enabled.
  std::optional<std::pair<Rrep, NodeId>> gratuitous;
};
using RreqResult = std::variant<RreqDuplicate, RreqRebroadcast, RreqReply>;

// handle_rrep outcomes
struct RrepInstalled {
  RoutingTableEntry entry;
};
struct RrepForward {
  Rrep rrep;
  NodeId next_hop;
  bool installed = false;
};
struct RrepRetained {};
struct RrepIgnored {};
using RrepResult = std::variant<RrepInstalled, RrepForward, RrepRetained, RrepIgnored>;

// forward_data outcomes
struct DataUnicast {
  NodeId next_hop;
};
struct DataBuffered {
  std::optional<Rreq> discovery;      ///< set when this packet started a discovery
  std::optional<DataPacket> evicted;  ///< oldest packet dropped on overflow
};
struct DataNoRoute {};
using ForwardResult = std::variant<DataUnicast, DataBuffered, DataNoRoute>;

class AodvNode {
 public:
  explicit AodvNode(NodeId self, AodvOptions options = {});

  NodeId id() const { return self_; }
  SeqNum own_seq() const { return own_seq_; }
  std::uint64_t next_broadcast_id() const { return next_broadcast_id_; }

  /// Starts (or restarts) a discovery for `dest`. Throws std::invalid_argument for self.
  Rreq originate_discovery(NodeId dest);

  RreqResult handle_rreq(const Rreq& rreq, NodeId from);

  /// Reply generated by the RREQ's destination. Throws std::logic_error elsewhere.
  Rrep make_dest_rrep(const Rreq& rreq);

  RrepResult handle_rrep(const Rrep& rrep, NodeId from, bool discovery_window_open);

  /// Installs the best reply retained while the collection window was open.
  std::optional<RoutingTableEntry> close_window(NodeId dest);

  /// Precondition: pkt.dest != self. Buffering only happens at the packet's origin.
  ForwardResult forward_data(const DataPacket& pkt);

  /// Invalidates every valid entry whose next hop is `lost_neighbor`.
  std::size_t invalidate_routes_via(NodeId lost_neighbor);

  /// Removes entries matching `pred` outright; returns how many were removed.
  std::size_t purge_routes(const std::function<bool(const RoutingTableEntry&)>& pred);

  /// Applies the freshness rule; returns true when the table changed.
  bool install(const RoutingTableEntry& candidate);

  const RoutingTableEntry* route(NodeId dest) const;
  std::optional<RoutingTableEntry> valid_route(NodeId dest) const;
  const std::map<NodeId, RoutingTableEntry>& routing_table() const { return table_; }

  bool discovery_open(NodeId dest) const { return open_discoveries_.contains(dest); }
  /// Closes the discovery for `dest` and hands back its buffered packets.
  std::vector<DataPacket> finish_discovery(NodeId dest);
  std::size_t pending_count() const;
  std::size_t pending_count(NodeId dest) const;
  bool has_seen(NodeId origin, std::uint64_t broadcast_id) const {
    return seen_rreqs_.contains({origin, broadcast_id});
  }

  /// Drops routes, buffers and open discoveries; sequence counters and the
  /// seen-RREQ set survive.
  void reset_routes();

 private:
  NodeId self_;
  AodvOptions options_;
  SeqNum own_seq_ = 0;
  std::uint64_t next_broadcast_id_ = 0;
  std::map<NodeId, RoutingTableEntry> table_;
  std::set<std::pair<NodeId, std::uint64_t>> seen_rreqs_;
  std::map<NodeId, std::deque<DataPacket>> pending_;
  std::set<NodeId> open_discoveries_;
  std::map<NodeId, RoutingTableEntry> window_best_;
};

}  // namespace bhsim
