#include "bhsim/validate.hpp"

#include <initializer_list>

namespace bhsim {

std::string_view message_kind(const Message& msg) {
  struct Namer {
    std::string_view operator()(const Rreq&) const { return "rreq"; }
    std::string_view operator()(const Rrep&) const { return "rrep"; }
    std::string_view operator()(const Frq&) const { return "frq"; }
    std::string_view operator()(const Frp&) const { return "frp"; }
    std::string_view operator()(const Alarm&) const { return "alarm"; }
    std::string_view operator()(const DataPacket&) const { return "data"; }
  };
  return std::visit(Namer{}, msg);
}

namespace {

bool all_in_range(std::initializer_list<NodeId> ids, std::uint32_t num_nodes) {
  for (NodeId id : ids) {
    if (id.value >= num_nodes) return false;
  }
  return true;
}

using Verdict = std::optional<std::string>;

struct Checker {
  std::uint32_t num_nodes;

  Verdict operator()(const Rreq& m) const {
    if (!all_in_range({m.origin, m.dest}, num_nodes)) return "node id out of range";
    if (m.origin == m.dest) return "origin equals dest";
    return std::nullopt;
  }

  Verdict operator()(const Rrep& m) const {
    if (!all_in_range({m.origin, m.dest, m.generator}, num_nodes)) return "node id out of range";
    if (m.responder_next_hop && m.responder_next_hop->value >= num_nodes) return "node id out of range";
    if (m.generator == m.dest && m.responder_next_hop) return "destination reply discloses a next hop";
    if (m.responder_dri_for_nhn && !m.responder_next_hop) return "dri disclosed without a next hop";
    if (m.origin == m.dest) return "origin equals dest";
    return std::nullopt;
  }

  Verdict operator()(const Frq& m) const {
    if (!all_in_range({m.asker, m.suspect, m.target, m.dest}, num_nodes)) return "node id out of range";
    if (m.suspect == m.target) return "suspect equals target";
    if (m.asker == m.suspect) return "asker equals suspect";
    return std::nullopt;
  }

  Verdict operator()(const Frp& m) const {
    if (!all_in_range({m.responder, m.asker, m.dest}, num_nodes)) return "node id out of range";
    if (m.responder_next_hop && m.responder_next_hop->value >= num_nodes) return "node id out of range";
    if (!m.responder_next_hop && m.dri_for_responder_next_hop) return "dri disclosed without a next hop";
    return std::nullopt;
  }

  Verdict operator()(const Alarm& m) const {
    if (m.black_holes.empty()) return "empty black hole set";
    if (m.reporter.value >= num_nodes) return "node id out of range";
    for (NodeId id : m.black_holes) {
      if (id.value >= num_nodes) return "node id out of range";
    }
    return std::nullopt;
  }

  Verdict operator()(const DataPacket& m) const {
    if (!all_in_range({m.origin, m.dest}, num_nodes)) return "node id out of range";
    if (m.payload_bytes == 0) return "empty payload";
    if (m.origin == m.dest) return "origin equals dest";
    return std::nullopt;
  }
};

}  // namespace

std::optional<std::string> validate_message(const Message& msg, std::uint32_t num_nodes) {
  return std::visit(Checker{num_nodes}, msg);
}

}  // namespace bhsim
