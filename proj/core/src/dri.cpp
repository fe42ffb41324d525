#include "bhsim/dri.hpp"

#include <algorithm>
#include <stdexcept>

namespace bhsim {

DriEntry DriTable::lookup(NodeId peer) const {
  if (peer == owner_) throw std::logic_error("DRI lookup of the table owner");
  auto it = entries_.find(peer);
  return it == entries_.end() ? DriEntry{} : it->second;
}

void DriTable::mark_from(NodeId peer) {
  if (peer == owner_) return;
  entries_[peer].from = true;
}

void DriTable::mark_through(NodeId peer) {
  if (peer == owner_) return;
  entries_[peer].through = true;
}

void dri_record_data_event(DriTable& table, std::optional<NodeId> prev_hop, std::optional<NodeId> confirmed_next_hop) {
  if (prev_hop) table.mark_from(*prev_hop);
  if (confirmed_next_hop) table.mark_through(*confirmed_next_hop);
}

bool is_reliable(const DriTable& table, NodeId peer) { return table.lookup(peer).through; }

std::vector<NodeId> Blacklist::add(const std::set<NodeId>& ids) {
  std::vector<NodeId> added;
  for (NodeId id : ids) {
    if (members_.insert(id).second) added.push_back(id);
  }
  return added;
}

AlarmOutcome propagate_alarm(const Alarm& alarm, Blacklist& blacklist) {
  if (!blacklist.first_sighting(alarm.reporter, alarm.alarm_id)) return {};
  return AlarmOutcome{.rebroadcast = true, .newly_listed = blacklist.add(alarm.black_holes)};
}

RouteDecision secure_route_decision(const Rrep& rrep, NodeId source, const DriTable& source_dri,
                                    const Blacklist& blacklist, std::uint32_t max_rounds) {
  if (blacklist.contains(rrep.generator)) return ReplyIgnored{};
  if (rrep.generator == rrep.dest) return RouteAccepted{};
  if (rrep.generator != source && is_reliable(source_dri, rrep.generator)) return RouteAccepted{};
  if (!rrep.responder_next_hop || !rrep.responder_dri_for_nhn) return ReplyUncheckable{};

  const NodeId target = *rrep.responder_next_hop;
  if (target == source || target == rrep.generator || blacklist.contains(target)) return ReplyUncheckable{};

  CrossCheckSession session{
      .source = source,
      .dest = rrep.dest,
      .current_suspect = rrep.generator,
      .current_target = target,
      .suspect_claimed_dri = *rrep.responder_dri_for_nhn,
      .hops_examined = {rrep.generator},
      .round = 1,
      .max_rounds = std::max<std::uint32_t>(max_rounds, 1),
  };
  const Frq frq = session.query();
  return CrossCheckStarted{std::move(session), frq};
}

Frp handle_frq(const DriTable& table, std::optional<NodeId> next_hop_to_dest, const Frq& frq) {
  Frp frp{
      .responder = table.owner(),
      .asker = frq.asker,
      .dest = frq.dest,
      .dri_for_suspect = table.lookup(frq.suspect),
      .responder_next_hop = std::nullopt,
      .dri_for_responder_next_hop = std::nullopt,
  };
  if (next_hop_to_dest && *next_hop_to_dest != table.owner()) {
    frp.responder_next_hop = next_hop_to_dest;
    frp.dri_for_responder_next_hop = table.lookup(*next_hop_to_dest);
  }
  return frp;
}

CheckOutcome handle_frp_at_source(CrossCheckSession& session, const Frp& frp, DriTable& source_dri) {
  if (frp.responder != session.current_target || frp.asker != session.source || frp.dest != session.dest) {
    return FrpIgnored{};
  }

  if (is_reliable(source_dri, session.current_target)) {
    const bool lie = session.suspect_claimed_dri.through && !frp.dri_for_suspect.from;
    if (lie) {
      // Everything from the reply's generator down to the exposed suspect.
      BlackHolesFound found;
      found.black_holes.insert(session.hops_examined.begin(), session.hops_examined.end());
      if (frp.responder_next_hop) found.reroute_via = session.current_target;
      return found;
    }
    source_dri.mark_through(session.current_suspect);
    return SuspectCleared{session.current_suspect};
  }

  // Unreliable target: it becomes the suspect and its own next hop is asked.
  if (!frp.responder_next_hop || !frp.dri_for_responder_next_hop) return CheckUnresolved{};
  const NodeId next_suspect = session.current_target;
  const NodeId next_target = *frp.responder_next_hop;
  auto& seen = session.hops_examined;
  const bool cycle = std::find(seen.begin(), seen.end(), next_suspect) != seen.end() ||
                     std::find(seen.begin(), seen.end(), next_target) != seen.end() || next_target == next_suspect ||
                     next_target == session.source || next_suspect == session.source;
  if (cycle || session.round + 1 > session.max_rounds) return CheckUnresolved{};

  session.current_suspect = next_suspect;
  session.current_target = next_target;
  session.suspect_claimed_dri = *frp.dri_for_responder_next_hop;
  seen.push_back(next_suspect);
  ++session.round;
  return CheckContinues{session.query()};
}

}  // namespace bhsim
