#include "bhsim/adversary.hpp"

#include <vector>

namespace bhsim {

namespace {
constexpr DriEntry kVouched{.from = true, .through = true};
}

Rrep blackhole_handle_rreq(const BlackHoleConfig& cfg, NodeId self, const Rreq& rreq,
                           std::optional<NodeId> fabricated_next_hop) {
  return Rrep{
      .origin = rreq.origin,
      .dest = rreq.dest,
      .dest_seq = rreq.dest_seq_known + cfg.seq_inflation,
      .hop_count = cfg.advertised_hop_count,
      .generator = self,
      .responder_next_hop = fabricated_next_hop,
      .responder_dri_for_nhn = fabricated_next_hop ? std::optional{kVouched} : std::nullopt,
  };
}

std::optional<NodeId> fabricate_next_hop(const BlackHoleConfig& cfg, NodeId self, std::span<const NodeId> neighbors,
                                         std::set<NodeId> avoid, Rng& rng) {
  avoid.insert(self);
  if (cfg.cooperative) {
    for (NodeId n : neighbors) {
      if (!avoid.contains(n) && cfg.members.contains(n)) return n;
    }
  }
  std::vector<NodeId> honest;
  for (NodeId n : neighbors) {
    if (!avoid.contains(n) && !cfg.members.contains(n)) honest.push_back(n);
  }
  if (honest.empty()) return std::nullopt;
  std::uniform_int_distribution<std::size_t> pick(0, honest.size() - 1);
  return honest[pick(rng)];
}

Frp blackhole_handle_frq(const BlackHoleConfig& cfg, NodeId self, const Frq& frq,
                         std::optional<NodeId> fabricated_onward) {
  if (cfg.cooperative && cfg.members.contains(frq.suspect)) {
    return Frp{
        .responder = self,
        .asker = frq.asker,
        .dest = frq.dest,
        .dri_for_suspect = kVouched,
        .responder_next_hop = fabricated_onward,
        .dri_for_responder_next_hop = fabricated_onward ? std::optional{kVouched} : std::nullopt,
    };
  }
  return Frp{
      .responder = self,
      .asker = frq.asker,
      .dest = frq.dest,
      .dri_for_suspect = DriEntry{},
      .responder_next_hop = std::nullopt,
      .dri_for_responder_next_hop = std::nullopt,
  };
}

void BlackHoleState::absorb(const DataPacket&) { ++absorbed_; }

}  // namespace bhsim
