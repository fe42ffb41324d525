#pragma once

// Data Routing Information tables and the source-side cross-check that uses
// them to expose black holes.
//
// A node's DRI table records, per peer, whether it has routed data *from* the
// peer and *through* the peer. A source that receives a route reply from an
// intermediate node it has never routed through asks that node's disclosed
// next hop (FRq) for its own view of the suspect (FRp). When the queried node
// is reliable and contradicts the suspect's claim, the suspect is a black hole.
// Unreliable next hops push the check one hop further down the chain.

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <utility>
#include <variant>
#include <vector>

#include "bhsim/messages.hpp"

namespace bhsim {

class DriTable {
 public:
  explicit DriTable(NodeId owner) : owner_(owner) {}

  NodeId owner() const { return owner_; }

  /// Stored entry, or (0,0). Throws std::logic_error for the owner itself.
  DriEntry lookup(NodeId peer) const;

  void mark_from(NodeId peer);
  void mark_through(NodeId peer);

  const std::map<NodeId, DriEntry>& entries() const { return entries_; }

 private:
  NodeId owner_;
  std::map<NodeId, DriEntry> entries_;
};

inline DriEntry dri_lookup(const DriTable& table, NodeId peer) { return table.lookup(peer); }

/// One data event at the owner: `prev_hop` is the neighbour the packet came
/// from (absent when the owner originated it); `confirmed_next_hop` is the
/// neighbour that acknowledged forwarding or delivering it.
void dri_record_data_event(DriTable& table, std::optional<NodeId> prev_hop, std::optional<NodeId> confirmed_next_hop);

/// A peer is reliable once data has been routed through it.
bool is_reliable(const DriTable& table, NodeId peer);

class Blacklist {
 public:
  bool contains(NodeId id) const { return members_.contains(id); }
  const std::set<NodeId>& members() const { return members_; }

  /// Returns the nodes that were not listed before.
  std::vector<NodeId> add(const std::set<NodeId>& ids);
  /// True the first time (reporter, alarm_id) is seen.
  bool first_sighting(NodeId reporter, std::uint64_t alarm_id) {
    return seen_alarms_.insert({reporter, alarm_id}).second;
  }

 private:
  std::set<NodeId> members_;
  std::set<std::pair<NodeId, std::uint64_t>> seen_alarms_;
};

struct AlarmOutcome {
  bool rebroadcast = false;
  std::vector<NodeId> newly_listed;
};

/// Unions a fresh alarm into the blacklist; duplicates change nothing.
AlarmOutcome propagate_alarm(const Alarm& alarm, Blacklist& blacklist);

struct CrossCheckSession {
  NodeId source;
  NodeId dest;
  NodeId current_suspect;
  NodeId current_target;
  DriEntry suspect_claimed_dri;
  std::vector<NodeId> hops_examined;  ///< suspects in the order examined, RREP generator first
  std::uint32_t round = 1;
  std::uint32_t max_rounds = 1;

  Frq query() const {
    return Frq{.asker = source, .suspect = current_suspect, .target = current_target, .dest = dest};
  }
};

// secure_route_decision outcomes
struct RouteAccepted {};
struct CrossCheckStarted {
  CrossCheckSession session;
  Frq frq;
};
struct ReplyIgnored {};
/// The reply cannot be checked (no next hop disclosed, or it names the source).
struct ReplyUncheckable {};
using RouteDecision = std::variant<RouteAccepted, CrossCheckStarted, ReplyIgnored, ReplyUncheckable>;

/// First look at a route reply at the discovery source.
RouteDecision secure_route_decision(const Rrep& rrep, NodeId source, const DriTable& source_dri,
                                    const Blacklist& blacklist, std::uint32_t max_rounds);

/// Answer of an honest target, built from its DRI table and its current next
/// hop toward `frq.dest`.
Frp handle_frq(const DriTable& table, std::optional<NodeId> next_hop_to_dest, const Frq& frq);

// handle_frp_at_source outcomes
struct SuspectCleared {
  NodeId suspect;
};
struct BlackHolesFound {
  std::set<NodeId> black_holes;
  /// Reliable target that still has a route onward; absent means restart discovery.
  std::optional<NodeId> reroute_via;
};
struct CheckContinues {
  Frq frq;
};
struct CheckUnresolved {};
struct FrpIgnored {};
using CheckOutcome = std::variant<SuspectCleared, BlackHolesFound, CheckContinues, CheckUnresolved, FrpIgnored>;

/// Applies one FRp to the session. On a cleared suspect the source's DRI entry
/// for it gains the through bit.
CheckOutcome handle_frp_at_source(CrossCheckSession& session, const Frp& frp, DriTable& source_dri);

}  // namespace bhsim
