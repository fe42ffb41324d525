#include "bhsim/aodv.hpp"

#include <algorithm>
#include <stdexcept>

namespace bhsim {

bool is_better_route(const RoutingTableEntry& candidate, const RoutingTableEntry* existing) {
  if (existing == nullptr) return true;
  if (!existing->valid) return candidate.dest_seq >= existing->dest_seq;
  if (candidate.dest_seq > existing->dest_seq) return true;
  return candidate.dest_seq == existing->dest_seq && candidate.hop_count < existing->hop_count;
}

AodvNode::AodvNode(NodeId self, AodvOptions options) : self_(self), options_(options) {}

Rreq AodvNode::originate_discovery(NodeId dest) {
  if (dest == self_) throw std::invalid_argument("route discovery for self");
  ++own_seq_;
  const std::uint64_t bid = next_broadcast_id_++;
  seen_rreqs_.insert({self_, bid});
  open_discoveries_.insert(dest);
  window_best_.erase(dest);

  const RoutingTableEntry* known = route(dest);
  return Rreq{
      .origin = self_,
      .origin_seq = own_seq_,
      .broadcast_id = bid,
      .dest = dest,
      .dest_seq_known = known ? known->dest_seq : 0,
      .hop_count = 0,
  };
}

RreqResult AodvNode::handle_rreq(const Rreq& rreq, NodeId from) {
  if (!seen_rreqs_.insert({rreq.origin, rreq.broadcast_id}).second) return RreqDuplicate{};

  install(RoutingTableEntry{
      .dest = rreq.origin,
      .next_hop = from,
      .hop_count = rreq.hop_count + 1,
      .dest_seq = rreq.origin_seq,
      .valid = true,
      .generator = rreq.origin,
  });
  // Reply along whichever reverse route survived the freshness rule.
  const auto reverse = valid_route(rreq.origin);
  const NodeId back = reverse ? reverse->next_hop : from;

  if (rreq.dest == self_) return RreqReply{.rrep = make_dest_rrep(rreq), .to = back, .gratuitous = std::nullopt};

  if (const auto entry = valid_route(rreq.dest); entry && entry->dest_seq >= rreq.dest_seq_known) {
    RreqReply reply{
        .rrep =
            Rrep{
                .origin = rreq.origin,
                .dest = rreq.dest,
                .dest_seq = entry->dest_seq,
                .hop_count = entry->hop_count,
                .generator = self_,
                .responder_next_hop = entry->next_hop,
                .responder_dri_for_nhn = std::nullopt,
            },
        .to = back,
        .gratuitous = std::nullopt,
    };
    if (options_.gratuitous_rrep) {
      reply.gratuitous = std::pair{
          Rrep{
              .origin = rreq.dest,
              .dest = rreq.origin,
              .dest_seq = rreq.origin_seq,
              .hop_count = rreq.hop_count + 1,
              .generator = self_,
              .responder_next_hop = std::nullopt,
              .responder_dri_for_nhn = std::nullopt,
          },
          entry->next_hop};
    }
    return reply;
  }

  Rreq onward = rreq;
  onward.hop_count = rreq.hop_count + 1;
  return RreqRebroadcast{onward};
}

Rrep AodvNode::make_dest_rrep(const Rreq& rreq) {
  if (rreq.dest != self_) throw std::logic_error("make_dest_rrep called at a non-destination node");
  own_seq_ = std::max(own_seq_, rreq.dest_seq_known + 1);
  return Rrep{
      .origin = rreq.origin,
      .dest = self_,
      .dest_seq = own_seq_,
      .hop_count = 0,
      .generator = self_,
      .responder_next_hop = std::nullopt,
      .responder_dri_for_nhn = std::nullopt,
  };
}

RrepResult AodvNode::handle_rrep(const Rrep& rrep, NodeId from, bool discovery_window_open) {
  if (rrep.dest == self_ || from == self_) return RrepIgnored{};

  const RoutingTableEntry candidate{
      .dest = rrep.dest,
      .next_hop = from,
      .hop_count = rrep.hop_count + 1,
      .dest_seq = rrep.dest_seq,
      .valid = true,
      .generator = rrep.generator,
  };

  if (rrep.origin == self_) {
    if (discovery_window_open) {
      auto it = window_best_.find(rrep.dest);
      if (it == window_best_.end() || is_better_route(candidate, &it->second)) window_best_[rrep.dest] = candidate;
      return RrepRetained{};
    }
    if (install(candidate)) return RrepInstalled{candidate};
    return RrepIgnored{};
  }

  const auto reverse = valid_route(rrep.origin);
  if (!reverse || reverse->next_hop == from) return RrepIgnored{};

  const bool installed = install(candidate);
  Rrep onward = rrep;
  onward.hop_count = rrep.hop_count + 1;
  return RrepForward{.rrep = onward, .next_hop = reverse->next_hop, .installed = installed};
}

std::optional<RoutingTableEntry> AodvNode::close_window(NodeId dest) {
  auto it = window_best_.find(dest);
  if (it == window_best_.end()) return std::nullopt;
  const RoutingTableEntry best = it->second;
  window_best_.erase(it);
  if (!install(best)) return std::nullopt;
  return best;
}

ForwardResult AodvNode::forward_data(const DataPacket& pkt) {
  if (const auto entry = valid_route(pkt.dest)) return DataUnicast{entry->next_hop};
  if (pkt.origin != self_) return DataNoRoute{};

  DataBuffered result;
  auto& queue = pending_[pkt.dest];
  queue.push_back(pkt);
  if (queue.size() > options_.pending_cap) {
    result.evicted = queue.front();
    queue.pop_front();
  }
  if (!discovery_open(pkt.dest)) result.discovery = originate_discovery(pkt.dest);
  return result;
}

std::size_t AodvNode::invalidate_routes_via(NodeId lost_neighbor) {
  std::size_t count = 0;
  for (auto& [dest, entry] : table_) {
    if (entry.valid && entry.next_hop == lost_neighbor) {
      entry.valid = false;
      ++count;
    }
  }
  return count;
}

std::size_t AodvNode::purge_routes(const std::function<bool(const RoutingTableEntry&)>& pred) {
  return std::erase_if(table_, [&](const auto& kv) { return pred(kv.second); });
}

bool AodvNode::install(const RoutingTableEntry& candidate) {
  if (candidate.dest == self_ || candidate.next_hop == self_ || !candidate.valid) return false;
  auto it = table_.find(candidate.dest);
  if (!is_better_route(candidate, it == table_.end() ? nullptr : &it->second)) return false;
  table_.insert_or_assign(candidate.dest, candidate);
  return true;
}

const RoutingTableEntry* AodvNode::route(NodeId dest) const {
  auto it = table_.find(dest);
  return it == table_.end() ? nullptr : &it->second;
}

std::optional<RoutingTableEntry> AodvNode::valid_route(NodeId dest) const {
  const RoutingTableEntry* entry = route(dest);
  if (entry == nullptr || !entry->valid) return std::nullopt;
  return *entry;
}

std::vector<DataPacket> AodvNode::finish_discovery(NodeId dest) {
  open_discoveries_.erase(dest);
  window_best_.erase(dest);
  std::vector<DataPacket> out;
  if (auto it = pending_.find(dest); it != pending_.end()) {
    out.assign(it->second.begin(), it->second.end());
    pending_.erase(it);
  }
  return out;
}

std::size_t AodvNode::pending_count() const {
  std::size_t n = 0;
  for (const auto& [dest, queue] : pending_) n += queue.size();
  return n;
}

std::size_t AodvNode::pending_count(NodeId dest) const {
  auto it = pending_.find(dest);
  return it == pending_.end() ? 0 : it->second.size();
}

void AodvNode::reset_routes() {
  table_.clear();
  pending_.clear();
  open_discoveries_.clear();
  window_best_.clear();
}

}  // namespace bhsim
