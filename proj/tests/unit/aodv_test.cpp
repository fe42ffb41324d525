#include <doctest.h>

#include <map>
#include <set>

#include "bhsim/aodv.hpp"
#include "support/generators.hpp"

using namespace bhsim;

namespace {

constexpr NodeId A{0}, B{1}, C{2}, D{3}, E{4}, F{5};

RoutingTableEntry entry(NodeId dest, NodeId via, std::uint32_t hops, SeqNum seq, bool valid = true) {
  return RoutingTableEntry{.dest = dest, .next_hop = via, .hop_count = hops, .dest_seq = seq, .valid = valid, .generator = dest};
}

Rreq request(NodeId origin, NodeId dest, SeqNum known, std::uint64_t bid = 0) {
  return Rreq{.origin = origin, .origin_seq = 1, .broadcast_id = bid, .dest = dest, .dest_seq_known = known, .hop_count = 0};
}

// Destination sequence number after a reply, given the node's counter and the
// requested number: the reply carries the larger of the two, where the
// requested number counts as one more than asked.
SeqNum seq_oracle(SeqNum current, SeqNum requested) { return current > requested ? current : requested + 1; }

}  // namespace

TEST_CASE("originating a discovery") {
  AodvNode a(A);
  const Rreq first = a.originate_discovery(E);
  CHECK(first.origin == A);
  CHECK(first.dest == E);
  CHECK(first.hop_count == 0);
  CHECK(first.broadcast_id == 0);
  CHECK(a.originate_discovery(E).broadcast_id == 1);
  CHECK_THROWS_AS(a.originate_discovery(A), std::invalid_argument);
}

TEST_CASE("destination answers its own request") {
  AodvNode e(E);
  const auto result = e.handle_rreq(request(A, E, 0), D);
  const auto* reply = std::get_if<RreqReply>(&result);
  REQUIRE(reply != nullptr);
  CHECK(reply->to == D);
  CHECK(reply->rrep.generator == E);
  CHECK(reply->rrep.hop_count == 0);
  CHECK_FALSE(reply->rrep.responder_next_hop.has_value());
}

TEST_CASE("duplicate requests are dropped") {
  AodvNode b(B);
  CHECK(std::holds_alternative<RreqRebroadcast>(b.handle_rreq(request(A, E, 0), A)));
  CHECK(std::holds_alternative<RreqDuplicate>(b.handle_rreq(request(A, E, 0), C)));
}

TEST_CASE("intermediate with a fresh enough route replies with its stored number") {
  // Chain A - B - E. B learned E's route at seq 9; A last knew seq 7.
  AodvNode b(B);
  REQUIRE(b.install(entry(E, E, 1, 9)));
  const auto result = b.handle_rreq(request(A, E, 7), A);
  const auto* reply = std::get_if<RreqReply>(&result);
  REQUIRE(reply != nullptr);

  // Oracle: every path from A to E on the chain runs through B, and the only
  // number B can vouch for is the one it stored.
  const SeqNum freshest_known_on_chain = 9;
  CHECK(reply->rrep.dest_seq == freshest_known_on_chain);
  CHECK(reply->rrep.dest_seq == 9);
  CHECK(reply->rrep.generator == B);
  CHECK(reply->rrep.responder_next_hop == E);
  CHECK(reply->rrep.hop_count == 1);
}

TEST_CASE("stale intermediate rebroadcasts") {
  AodvNode b(B);
  REQUIRE(b.install(entry(E, E, 1, 5)));
  const auto result = b.handle_rreq(request(A, E, 7), A);
  const auto* fwd = std::get_if<RreqRebroadcast>(&result);
  REQUIRE(fwd != nullptr);
  CHECK(fwd->rreq.hop_count == 1);
  REQUIRE(b.valid_route(A).has_value());
  CHECK(b.valid_route(A)->next_hop == A);
}

TEST_CASE("destination sequence rule") {
  struct Case {
    SeqNum current, requested, expected;
  };
  for (const Case c : {Case{5, 7, 8}, Case{10, 3, 10}, Case{4, 4, 5}}) {
    CAPTURE(c.current);
    CAPTURE(c.requested);
    AodvNode e(E);
    while (e.own_seq() < c.current) (void)e.make_dest_rrep(request(A, E, e.own_seq()));
    REQUIRE(e.own_seq() == c.current);
    CHECK(e.make_dest_rrep(request(A, E, c.requested)).dest_seq == c.expected);
    CHECK(seq_oracle(c.current, c.requested) == c.expected);
  }
  AodvNode b(B);
  CHECK_THROWS_AS((void)b.make_dest_rrep(request(A, E, 0)), std::logic_error);
}

TEST_CASE("property: destination number follows max(current, requested + 1)") {
  testing::Gen g(11);
  for (int i = 0; i < 300; ++i) {
    AodvNode e(E);
    const SeqNum current = g.u64(0, 30);
    while (e.own_seq() < current) (void)e.make_dest_rrep(request(A, E, e.own_seq()));
    const SeqNum requested = g.u64(0, 40);
    const SeqNum got = e.make_dest_rrep(request(A, E, requested)).dest_seq;
    CHECK(got == std::max(current, requested + 1));
    CHECK(got >= current);
  }
}

TEST_CASE("route replacement follows freshness then length") {
  const auto existing = entry(E, B, 2, 5);
  CHECK(is_better_route(entry(E, C, 4, 9), &existing));

  const auto seven_three = entry(E, B, 3, 7);
  CHECK(is_better_route(entry(E, C, 2, 7), &seven_three));

  const auto seven_two = entry(E, B, 2, 7);
  CHECK_FALSE(is_better_route(entry(E, C, 2, 7), &seven_two));

  CHECK(is_better_route(entry(E, C, 9, 0), nullptr));
  const auto invalid = entry(E, B, 2, 7, false);
  CHECK(is_better_route(entry(E, C, 5, 7), &invalid));
  CHECK_FALSE(is_better_route(entry(E, C, 1, 6), &invalid));
}

TEST_CASE("origin installs replies, late ones only when better") {
  AodvNode a(A);
  (void)a.originate_discovery(E);
  const Rrep from_b{.origin = A, .dest = E, .dest_seq = 9, .hop_count = 2, .generator = E};
  CHECK(std::holds_alternative<RrepInstalled>(a.handle_rrep(from_b, B, false)));
  const Rrep stale{.origin = A, .dest = E, .dest_seq = 8, .hop_count = 0, .generator = E};
  CHECK(std::holds_alternative<RrepIgnored>(a.handle_rrep(stale, C, false)));
  CHECK(a.valid_route(E)->next_hop == B);
}

TEST_CASE("reply window keeps the best candidate") {
  AodvNode a(A);
  (void)a.originate_discovery(E);
  CHECK(std::holds_alternative<RrepRetained>(a.handle_rrep(Rrep{.origin = A, .dest = E, .dest_seq = 5, .hop_count = 3, .generator = E}, B, true)));
  CHECK(std::holds_alternative<RrepRetained>(a.handle_rrep(Rrep{.origin = A, .dest = E, .dest_seq = 5, .hop_count = 1, .generator = E}, C, true)));
  CHECK_FALSE(a.valid_route(E).has_value());
  const auto best = a.close_window(E);
  REQUIRE(best.has_value());
  CHECK(best->next_hop == C);
  CHECK(best->hop_count == 2);
}

TEST_CASE("relays forward replies along the reverse route") {
  AodvNode b(B);
  (void)b.handle_rreq(request(A, E, 0), A);
  const Rrep r{.origin = A, .dest = E, .dest_seq = 3, .hop_count = 0, .generator = E};
  const auto result = b.handle_rrep(r, E, false);
  const auto* fwd = std::get_if<RrepForward>(&result);
  REQUIRE(fwd != nullptr);
  CHECK(fwd->next_hop == A);
  CHECK(fwd->rrep.hop_count == 1);
  CHECK(fwd->installed);

  AodvNode lost(C);
  CHECK(std::holds_alternative<RrepIgnored>(lost.handle_rrep(r, E, false)));
}

TEST_CASE("data forwarding") {
  AodvNode a(A);
  REQUIRE(a.install(entry(E, B, 3, 4)));
  const DataPacket pkt{.origin = A, .dest = E};
  const auto sent = a.forward_data(pkt);
  REQUIRE(std::holds_alternative<DataUnicast>(sent));
  CHECK(std::get<DataUnicast>(sent).next_hop == B);

  AodvNode fresh(A);
  const auto buffered = fresh.forward_data(pkt);
  const auto* buf = std::get_if<DataBuffered>(&buffered);
  REQUIRE(buf != nullptr);
  REQUIRE(buf->discovery.has_value());
  CHECK(buf->discovery->dest == E);
  CHECK(fresh.pending_count(E) == 1);
  const auto second = fresh.forward_data(pkt);
  CHECK_FALSE(std::get<DataBuffered>(second).discovery.has_value());

  AodvNode relay(C);
  CHECK(std::holds_alternative<DataNoRoute>(relay.forward_data(pkt)));
}

TEST_CASE("pending buffer evicts the oldest packet") {
  AodvNode a(A, AodvOptions{.pending_cap = 2});
  for (std::uint64_t i = 0; i < 2; ++i) (void)a.forward_data(DataPacket{.origin = A, .dest = E, .pkt_id = i});
  const auto third = a.forward_data(DataPacket{.origin = A, .dest = E, .pkt_id = 2});
  const auto& buf = std::get<DataBuffered>(third);
  REQUIRE(buf.evicted.has_value());
  CHECK(buf.evicted->pkt_id == 0);
  CHECK(a.pending_count(E) == 2);
  const auto flushed = a.finish_discovery(E);
  REQUIRE(flushed.size() == 2);
  CHECK(flushed.front().pkt_id == 1);
}

TEST_CASE("invalidating routes through a lost neighbour") {
  AodvNode n(A);
  REQUIRE(n.install(entry(E, B, 2, 1)));
  REQUIRE(n.install(entry(D, B, 3, 1)));
  REQUIRE(n.install(entry(C, F, 1, 1)));
  CHECK(n.invalidate_routes_via(B) == 2);
  CHECK(n.invalidate_routes_via(D) == 0);
  CHECK(n.valid_route(C).has_value());
  AodvNode empty(A);
  CHECK(empty.invalidate_routes_via(B) == 0);
}

TEST_CASE("property: a node's stored number for a destination never decreases") {
  testing::Gen g(3);
  for (int trial = 0; trial < 100; ++trial) {
    AodvNode n(A);
    std::map<std::uint32_t, SeqNum> high;
    for (int step = 0; step < 60; ++step) {
      const NodeId dest{g.u32(1, 6)};
      switch (g.u32(0, 2)) {
        case 0:
          (void)n.install(entry(dest, NodeId{g.u32(1, 6)}, g.u32(1, 8), g.u64(0, 20)));
          break;
        case 1:
          (void)n.invalidate_routes_via(NodeId{g.u32(1, 6)});
          break;
        default: {
          const Rrep r{.origin = A, .dest = dest, .dest_seq = g.u64(0, 20), .hop_count = g.u32(0, 5), .generator = dest};
          (void)n.handle_rrep(r, NodeId{g.u32(1, 6)}, false);
        }
      }
      for (const auto& [d, e] : n.routing_table()) {
        CHECK(e.dest_seq >= high[d.value]);
        high[d.value] = e.dest_seq;
      }
    }
  }
}
