#include "bhsim/engine.hpp"

#include <fmt/format.h>
#include <fmt/ranges.h>

#include <algorithm>
#include <deque>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <variant>

#include "bhsim/adversary.hpp"
#include "bhsim/radio.hpp"
#include "bhsim/rng.hpp"

namespace bhsim {

namespace {

// Event kinds.
struct MsgDelivery {
  NodeId to;
  NodeId from;
  Message msg;
};
struct Transmit {  // unicast attempted later (delayed forged replies)
  NodeId from;
  NodeId to;
  Message msg;
};
struct MobilityUpdate {
  NodeId node;
};
struct CbrEmit {
  std::uint32_t flow;
};
struct WarmupEmit {
  NodeId src;
  NodeId dst;
};
struct WindowClose {
  NodeId node;
  NodeId dest;
  std::uint64_t serial;
};
struct DiscoveryTimeout {
  NodeId node;
  NodeId dest;
  std::uint64_t serial;
};
struct CheckAbandoned {
  NodeId node;
  NodeId dest;
  NodeId target;
};
struct PhaseStart {};
struct RunEnd {};

using EventKind = std::variant<MsgDelivery, Transmit, MobilityUpdate, CbrEmit, WarmupEmit, WindowClose,
                               DiscoveryTimeout, CheckAbandoned, PhaseStart, RunEnd>;

struct Event {
  SimTime at = 0.0;
  std::uint64_t tie_break = 0;
  EventKind kind;
};

// Min-heap order on (at, tie_break).
struct Later {
  bool operator()(const Event& a, const Event& b) const {
    if (a.at != b.at) return a.at > b.at;
    return a.tie_break > b.tie_break;
  }
};

struct Reply {
  Rrep rrep;
  NodeId from;
};

struct ActiveCheck {
  CrossCheckSession session;
  Reply reply;
};

// Source-side bookkeeping for one open route discovery.
struct Discovery {
  std::uint64_t serial = 0;
  std::uint32_t attempts = 1;
  bool window_scheduled = false;
  std::deque<Reply> queued;
  std::optional<ActiveCheck> check;
};

std::string join_ids(const std::set<NodeId>& ids) { return fmt::format("{}", fmt::join(ids, ";")); }

}  // namespace

struct Engine::Impl {
  struct Node {
    AodvNode aodv;
    DriTable dri;
    Blacklist blacklist;
    bool black_hole = false;
    BlackHoleState bh;
    std::map<NodeId, Discovery> discoveries;
    std::uint64_t next_alarm_id = 0;

    Node(NodeId id, AodvOptions opts, bool bh_role) : aodv(id, opts), dri(id), black_hole(bh_role) {}
  };

  ScenarioConfig cfg;
  EngineOptions options;
  std::vector<Node> nodes;
  std::vector<Position> positions;
  std::vector<WaypointState> mobility;
  std::vector<Rng> mobility_rng;
  WaypointParams waypoint;
  std::vector<Flow> flows;
  std::vector<CbrSource> sources;
  std::vector<SimTime> source_start;
  Rng adversary_rng;

  std::vector<Event> queue;
  std::uint64_t next_tie = 0;
  SimTime now = 0.0;
  SimTime t0 = 0.0;
  SimTime traffic_stop = 0.0;
  SimTime end = 0.0;
  bool done = false;
  std::uint64_t executed = 0;
  std::uint64_t discovery_serial = 0;
  std::uint64_t warmup_pkt_id = 0;

  std::vector<FlowMetrics> flow_metrics;
  std::vector<TraceEvent> trace;
  std::set<NodeId> flagged;
  std::uint64_t alarms_raised = 0;

  Impl(ScenarioConfig c, EngineOptions o) : cfg(std::move(c)), options(o) {
    validate_scenario(cfg);
    adversary_rng = make_rng(cfg.seed, RngStream::adversary);

    const AodvOptions aodv_opts{.gratuitous_rrep = cfg.gratuitous_rrep, .pending_cap = kPendingBufferCap};
    nodes.reserve(cfg.num_nodes);
    for (std::uint32_t i = 0; i < cfg.num_nodes; ++i) {
      nodes.emplace_back(NodeId{i}, aodv_opts, cfg.attack.is_member(NodeId{i}));
    }

    place_nodes();
    choose_flows();

    const bool warmup = cfg.detection.enabled && cfg.detection.warmup_flows > 0;
    t0 = warmup ? kWarmupPhaseSeconds : 0.0;
    traffic_stop = t0 + cfg.duration_seconds;
    end = traffic_stop + cfg.drain_seconds;

    if (warmup) schedule_warmup();
    schedule_mobility();
    schedule_traffic();
    schedule(end, RunEnd{});
  }

  // ---- setup -------------------------------------------------------------

  void place_nodes() {
    if (!cfg.positions.empty()) {
      positions = cfg.positions;
    } else {
      Rng rng = make_rng(cfg.seed, RngStream::placement);
      constexpr int kMaxAttempts = 1000;
      for (int attempt = 0;; ++attempt) {
        positions.clear();
        for (std::uint32_t i = 0; i < cfg.num_nodes; ++i) positions.push_back(uniform_position(cfg.area, rng));
        if (!cfg.require_connected || is_connected(positions, cfg.radio_range)) break;
        if (attempt + 1 == kMaxAttempts) throw ScenarioError("could not draw a connected placement");
      }
    }
    waypoint = WaypointParams{cfg.area, cfg.speed, cfg.pause_seconds, cfg.mobility_tick};
    for (std::uint32_t i = 0; i < cfg.num_nodes; ++i) {
      mobility.push_back(WaypointState{positions[i], positions[i], 0.0, std::nullopt});
      mobility_rng.push_back(make_rng(cfg.seed, RngStream::mobility_base, i));
    }
  }

  std::vector<NodeId> honest_nodes() const {
    std::vector<NodeId> out;
    for (std::uint32_t i = 0; i < cfg.num_nodes; ++i) {
      // Members are excluded even when the attack is off.
      if (!cfg.attack.members.contains(NodeId{i})) out.emplace_back(i);
    }
    return out;
  }

  void choose_flows() {
    Rng rng = make_rng(cfg.seed, RngStream::flows);
    if (!cfg.cbr.flows.empty()) {
      flows = cfg.cbr.flows;
    } else {
      const auto honest = honest_nodes();
      std::uniform_int_distribution<std::size_t> pick(0, honest.size() - 1);
      std::set<Flow> used;
      while (flows.size() < cfg.cbr.num_random_flows) {
        const Flow f{honest[pick(rng)], honest[pick(rng)]};
        if (f.src == f.dst || !used.insert(f).second) continue;
        flows.push_back(f);
      }
    }
    std::uniform_real_distribution<double> offset(0.0, 1.0 / cfg.cbr.rate_pps);
    for (std::uint32_t i = 0; i < flows.size(); ++i) {
      sources.emplace_back(i, flows[i], cfg.cbr.rate_pps, cfg.cbr.payload_bytes);
      source_start.push_back(offset(rng));
    }
    flow_metrics.assign(flows.size(), FlowMetrics{});
  }

  void schedule_warmup() {
    Rng rng = make_rng(cfg.seed, RngStream::warmup);
    const auto honest = honest_nodes();
    if (honest.size() < 2) return;
    std::uniform_int_distribution<std::size_t> pick(0, honest.size() - 1);
    std::uniform_real_distribution<double> start(0.0, 0.5);
    for (NodeId src : honest) {
      for (std::uint32_t k = 0; k < cfg.detection.warmup_flows; ++k) {
        NodeId dst = src;
        while (dst == src) dst = honest[pick(rng)];
        const SimTime s = start(rng);
        for (std::uint32_t j = 0; j < kWarmupPacketsPerFlow; ++j) schedule(s + 0.2 * j, WarmupEmit{src, dst});
      }
    }
    schedule(t0, PhaseStart{});
  }

  void schedule_mobility() {
    if (cfg.speed <= 0.0) return;
    for (std::uint32_t i = 0; i < cfg.num_nodes; ++i) {
      mobility[i].pausing_until = t0;
      schedule(t0 + cfg.mobility_tick, MobilityUpdate{NodeId{i}});
    }
  }

  void schedule_traffic() {
    for (std::uint32_t i = 0; i < sources.size(); ++i) {
      const SimTime first = t0 + source_start[i];
      if (first < traffic_stop) schedule(first, CbrEmit{i});
    }
  }

  // ---- queue -------------------------------------------------------------

  void schedule(SimTime at, EventKind kind) {
    queue.push_back(Event{at, next_tie++, std::move(kind)});
    std::push_heap(queue.begin(), queue.end(), Later{});
  }

  bool step() {
    if (done) return false;
    if (queue.empty()) {
      done = true;
      return false;
    }
    std::pop_heap(queue.begin(), queue.end(), Later{});
    Event ev = std::move(queue.back());
    queue.pop_back();
    now = ev.at;
    ++executed;
    std::visit([this](auto& e) { handle(e); }, ev.kind);
    return !done;
  }

  // ---- tracing -----------------------------------------------------------

  void note(std::string_view ev, NodeId node, std::optional<NodeId> from = std::nullopt,
            std::optional<NodeId> dst = std::nullopt, std::optional<std::uint64_t> pkt = std::nullopt,
            std::string detail = {}) {
    if (!options.trace) return;
    trace.push_back(TraceEvent{now, std::string(ev), node, from, dst, pkt, std::move(detail)});
  }

  // ---- radio -------------------------------------------------------------

  // Black holes join only once measured traffic starts.
  bool active(NodeId id) const { return !(nodes[id.value].black_hole && now < t0); }

  std::vector<NodeId> neighbors_of(NodeId id) const {
    auto all = neighbors(positions, id, cfg.radio_range);
    std::erase_if(all, [this](NodeId n) { return !active(n); });
    return all;
  }

  bool adjacent(NodeId a, NodeId b) const {
    return active(b) && in_range(positions[a.value], positions[b.value], cfg.radio_range);
  }

  void broadcast(NodeId from, const Message& msg) {
    for (NodeId n : neighbors_of(from)) schedule(now + cfg.latency, MsgDelivery{n, from, msg});
  }

  bool unicast(NodeId from, NodeId to, const Message& msg) {
    if (from == to || !adjacent(from, to)) return false;
    schedule(now + cfg.latency, MsgDelivery{to, from, msg});
    return true;
  }

  // Multi-hop control message over a path that avoids `excluded`; delivered
  // in one step after path-length hops of latency.
  bool send_control(NodeId from, NodeId to, const Message& msg, std::set<NodeId> excluded) {
    for (std::uint32_t i = 0; i < cfg.num_nodes; ++i) {
      if (!active(NodeId{i})) excluded.insert(NodeId{i});
    }
    const auto path = shortest_path(positions, cfg.radio_range, from, to, excluded);
    if (!path || path->size() < 2) return false;
    const auto hops = static_cast<double>(path->size() - 1);
    schedule(now + hops * cfg.latency, MsgDelivery{to, (*path)[path->size() - 2], msg});
    return true;
  }

  void link_failure(NodeId self, NodeId lost) {
    const auto n = nodes[self.value].aodv.invalidate_routes_via(lost);
    note("linkfail", self, std::nullopt, std::nullopt, std::nullopt, fmt::format("to:{},invalidated:{}", lost, n));
  }

  // ---- metrics helpers -----------------------------------------------------

  FlowMetrics* metrics_for(const DataPacket& pkt) {
    if (pkt.is_warmup() || pkt.flow >= flow_metrics.size()) return nullptr;
    return &flow_metrics[pkt.flow];
  }

  void drop(NodeId self, const DataPacket& pkt, std::string_view cause) {
    if (auto* m = metrics_for(pkt)) {
      if (cause == "buffer") {
        ++m->buffer_drops;
      } else {
        ++m->no_route_drops;
      }
    }
    note("drop", self, std::nullopt, pkt.dest, pkt.pkt_id, fmt::format("cause:{}", cause));
  }

  // ---- event handlers ----------------------------------------------------

  void handle(MsgDelivery& e) {
    if (!active(e.to)) return;
    std::visit([&](auto& m) { receive(e.to, m, e.from); }, e.msg);
  }

  void handle(Transmit& e) {
    if (!unicast(e.from, e.to, e.msg) && !nodes[e.from.value].black_hole) link_failure(e.from, e.to);
  }

  void handle(MobilityUpdate& e) {
    const auto i = e.node.value;
    const auto next = waypoint_step(mobility[i], waypoint, now, mobility_rng[i]);
    positions[i] = mobility[i].position;
    if (next && *next <= end) schedule(*next, MobilityUpdate{e.node});
  }

  void handle(CbrEmit& e) {
    CbrSource& src = sources[e.flow];
    const DataPacket pkt = src.emit(now);
    ++flow_metrics[e.flow].originated;
    note("emit", pkt.origin, std::nullopt, pkt.dest, pkt.pkt_id);
    originate_send(pkt.origin, pkt);
    const SimTime next = t0 + source_start[e.flow] + static_cast<double>(src.emitted()) * src.interval();
    if (next < traffic_stop) schedule(next, CbrEmit{e.flow});
  }

  void handle(WarmupEmit& e) {
    const DataPacket pkt{
        .origin = e.src,
        .dest = e.dst,
        .pkt_id = warmup_pkt_id++,
        .payload_bytes = cfg.cbr.payload_bytes,
        .created_at = now,
        .flow = kWarmupFlow,
        .hops = 0,
    };
    originate_send(e.src, pkt);
  }

  void handle(WindowClose& e) {
    Node& n = nodes[e.node.value];
    auto it = n.discoveries.find(e.dest);
    if (it == n.discoveries.end() || it->second.serial != e.serial) return;
    it->second.window_scheduled = false;
    if (const auto best = n.aodv.close_window(e.dest)) note_route(e.node, *best);
    if (n.aodv.valid_route(e.dest)) complete_discovery(e.node, e.dest);
  }

  void handle(DiscoveryTimeout& e) {
    Node& n = nodes[e.node.value];
    auto it = n.discoveries.find(e.dest);
    if (it == n.discoveries.end() || it->second.serial != e.serial) return;
    if (it->second.check) {
      schedule(now + cfg.discovery_timeout, DiscoveryTimeout{e.node, e.dest, e.serial});
      return;
    }
    restart_discovery(e.node, e.dest);
  }

  void handle(CheckAbandoned& e) {
    Node& n = nodes[e.node.value];
    auto it = n.discoveries.find(e.dest);
    if (it == n.discoveries.end() || !it->second.check || it->second.check->session.current_target != e.target) return;
    it->second.check.reset();
    note("check_lost", e.node, std::nullopt, e.dest, std::nullopt, fmt::format("target:{}", e.target));
    next_reply(e.node, e.dest);
  }

  void handle(PhaseStart&) {
    // Warm-up leaves DRI history behind; routes and buffers start fresh.
    for (Node& n : nodes) {
      n.aodv.reset_routes();
      n.discoveries.clear();
    }
    note("phase", NodeId{0}, std::nullopt, std::nullopt, std::nullopt, "traffic:start");
  }

  void handle(RunEnd&) {
    note("end", NodeId{0});
    done = true;
  }

  // ---- routing control ---------------------------------------------------

  void note_route(NodeId self, const RoutingTableEntry& e) {
    note("route", self, std::nullopt, e.dest, std::nullopt,
         fmt::format("next:{},hops:{},seq:{}", e.next_hop, e.hop_count, e.dest_seq));
  }

  void receive(NodeId self, const Rreq& rreq, NodeId from) {
    Node& n = nodes[self.value];
    if (n.black_hole && rreq.dest != self) {
      if (!n.bh.first_sighting(rreq)) return;
      const auto nhn = fabricate_next_hop(cfg.attack, self, neighbors_of(self), {rreq.origin}, adversary_rng);
      const Rrep forged = blackhole_handle_rreq(cfg.attack, self, rreq, nhn);
      n.bh.note_forged_reply();
      note("rrep", self, std::nullopt, rreq.dest, std::nullopt,
           fmt::format("to:{},seq:{},forged:1", from, forged.dest_seq));
      if (cfg.attack.respond_delay_seconds > 0.0) {
        schedule(now + cfg.attack.respond_delay_seconds, Transmit{self, from, forged});
      } else {
        unicast(self, from, forged);
      }
      return;
    }
    if (n.blacklist.contains(from)) return;

    auto result = n.aodv.handle_rreq(rreq, from);
    if (auto* fwd = std::get_if<RreqRebroadcast>(&result)) {
      note("rreq_fwd", self, from, rreq.dest, std::nullopt, fmt::format("origin:{},hops:{}", rreq.origin, fwd->rreq.hop_count));
      broadcast(self, fwd->rreq);
    } else if (auto* reply = std::get_if<RreqReply>(&result)) {
      if (reply->rrep.responder_next_hop) reply->rrep.responder_dri_for_nhn = n.dri.lookup(*reply->rrep.responder_next_hop);
      note("rrep", self, std::nullopt, rreq.dest, std::nullopt,
           fmt::format("to:{},seq:{},forged:0", reply->to, reply->rrep.dest_seq));
      if (!unicast(self, reply->to, reply->rrep)) link_failure(self, reply->to);
      if (reply->gratuitous && !unicast(self, reply->gratuitous->second, reply->gratuitous->first)) {
        link_failure(self, reply->gratuitous->second);
      }
    }
  }

  void receive(NodeId self, const Rrep& rrep, NodeId from) {
    Node& n = nodes[self.value];
    if (n.black_hole) return;
    if (n.blacklist.contains(from) || n.blacklist.contains(rrep.generator)) return;
    if (rrep.origin == self) {
      rrep_at_origin(self, rrep, from);
      return;
    }
    auto result = n.aodv.handle_rrep(rrep, from, false);
    if (auto* fwd = std::get_if<RrepForward>(&result)) {
      if (fwd->installed) note_route(self, *n.aodv.route(rrep.dest));
      note("rrep_fwd", self, from, rrep.dest, std::nullopt, fmt::format("to:{}", fwd->next_hop));
      if (!unicast(self, fwd->next_hop, fwd->rrep)) link_failure(self, fwd->next_hop);
    }
  }

  void rrep_at_origin(NodeId self, const Rrep& rrep, NodeId from) {
    Node& n = nodes[self.value];
    auto it = n.discoveries.find(rrep.dest);

    if (cfg.detection.enabled) {
      // Only replies to an open discovery are considered, one at a time.
      if (it == n.discoveries.end()) return;
      if (it->second.check) {
        it->second.queued.push_back(Reply{rrep, from});
        return;
      }
      evaluate_reply(self, rrep.dest, Reply{rrep, from});
      return;
    }

    if (it != n.discoveries.end() && cfg.rrep_window_seconds > 0.0) {
      if (!it->second.window_scheduled) {
        it->second.window_scheduled = true;
        schedule(now + cfg.rrep_window_seconds, WindowClose{self, rrep.dest, it->second.serial});
      }
      n.aodv.handle_rrep(rrep, from, true);
      return;
    }

    auto result = n.aodv.handle_rrep(rrep, from, false);
    if (auto* inst = std::get_if<RrepInstalled>(&result)) note_route(self, inst->entry);
    if (it != n.discoveries.end() && n.aodv.valid_route(rrep.dest)) complete_discovery(self, rrep.dest);
  }

  Discovery* discovery(NodeId self, NodeId dest) {
    auto& d = nodes[self.value].discoveries;
    auto it = d.find(dest);
    return it == d.end() ? nullptr : &it->second;
  }

  void evaluate_reply(NodeId self, NodeId dest, const Reply& reply) {
    Node& n = nodes[self.value];
    const auto decision = secure_route_decision(reply.rrep, self, n.dri, n.blacklist, cfg.effective_max_rounds());

    if (std::holds_alternative<RouteAccepted>(decision)) {
      if (!accept_reply(self, dest, reply, "trusted")) next_reply(self, dest);
      return;
    }
    if (const auto* started = std::get_if<CrossCheckStarted>(&decision)) {
      Discovery* d = discovery(self, dest);
      d->check = ActiveCheck{started->session, reply};
      if (!send_frq(self, started->frq, started->session)) {
        d->check.reset();
        next_reply(self, dest);
      }
      return;
    }
    next_reply(self, dest);
  }

  bool accept_reply(NodeId self, NodeId dest, const Reply& reply, std::string_view how) {
    Node& n = nodes[self.value];
    const RoutingTableEntry entry{
        .dest = dest,
        .next_hop = reply.from,
        .hop_count = reply.rrep.hop_count + 1,
        .dest_seq = reply.rrep.dest_seq,
        .valid = true,
        .generator = reply.rrep.generator,
    };
    if (!n.aodv.install(entry)) return false;
    note("accept", self, std::nullopt, dest, std::nullopt,
         fmt::format("via:{},generator:{},check:{}", reply.from, reply.rrep.generator, how));
    note_route(self, entry);
    complete_discovery(self, dest);
    return true;
  }

  // Next queued reply, or a fresh discovery when none is left.
  void next_reply(NodeId self, NodeId dest) {
    Discovery* d = discovery(self, dest);
    if (d == nullptr) return;
    const Blacklist& bl = nodes[self.value].blacklist;
    while (!d->queued.empty()) {
      Reply r = d->queued.front();
      d->queued.pop_front();
      if (bl.contains(r.from) || bl.contains(r.rrep.generator)) continue;
      evaluate_reply(self, dest, r);
      return;
    }
    restart_discovery(self, dest);
  }

  bool send_frq(NodeId self, const Frq& frq, const CrossCheckSession& session) {
    std::set<NodeId> excluded(session.hops_examined.begin(), session.hops_examined.end());
    const auto& bl = nodes[self.value].blacklist.members();
    excluded.insert(bl.begin(), bl.end());
    note("frq", self, std::nullopt, frq.dest, std::nullopt,
         fmt::format("suspect:{},target:{},round:{}", frq.suspect, frq.target, session.round));
    return send_control(self, frq.target, frq, std::move(excluded));
  }

  void receive(NodeId self, const Frq& frq, NodeId) {
    Node& n = nodes[self.value];
    if (frq.target != self) return;
    Frp frp;
    if (n.black_hole) {
      std::optional<NodeId> onward;
      if (cfg.attack.cooperative && cfg.attack.members.contains(frq.suspect)) {
        onward = fabricate_next_hop(cfg.attack, self, neighbors_of(self), {frq.asker, frq.suspect}, adversary_rng);
      }
      frp = blackhole_handle_frq(cfg.attack, self, frq, onward);
    } else {
      std::optional<NodeId> next;
      if (const auto r = n.aodv.valid_route(frq.dest)) next = r->next_hop;
      frp = handle_frq(n.dri, next, frq);
    }
    note("frp", self, std::nullopt, frq.dest, std::nullopt,
         fmt::format("to:{},suspect:{},from_bit:{},through_bit:{}", frq.asker, frq.suspect,
                     int(frp.dri_for_suspect.from), int(frp.dri_for_suspect.through)));
    if (!send_control(self, frq.asker, frp, {frq.suspect})) {
      schedule(now + cfg.latency, CheckAbandoned{frq.asker, frq.dest, self});
    }
  }

  void receive(NodeId self, const Frp& frp, NodeId) {
    Node& n = nodes[self.value];
    if (frp.asker != self || n.black_hole) return;
    Discovery* d = discovery(self, frp.dest);
    if (d == nullptr || !d->check) return;

    const CheckOutcome outcome = handle_frp_at_source(d->check->session, frp, n.dri);
    if (std::holds_alternative<FrpIgnored>(outcome)) return;

    if (const auto* cont = std::get_if<CheckContinues>(&outcome)) {
      if (!send_frq(self, cont->frq, d->check->session)) {
        d->check.reset();
        next_reply(self, frp.dest);
      }
      return;
    }

    const ActiveCheck check = *d->check;
    d->check.reset();

    if (const auto* cleared = std::get_if<SuspectCleared>(&outcome)) {
      note("cleared", self, std::nullopt, frp.dest, std::nullopt, fmt::format("suspect:{}", cleared->suspect));
      if (!accept_reply(self, frp.dest, check.reply, "cross-checked")) next_reply(self, frp.dest);
      return;
    }

    if (const auto* found = std::get_if<BlackHolesFound>(&outcome)) {
      flagged.insert(found->black_holes.begin(), found->black_holes.end());
      ++alarms_raised;
      note("flag", self, std::nullopt, frp.dest, std::nullopt, fmt::format("blackholes:{}", join_ids(found->black_holes)));
      raise_alarm(self, found->black_holes);
      if (found->reroute_via && reroute_via_target(self, frp.dest, *found->reroute_via)) return;
      // Queued replies may predate the alarm.
      restart_discovery(self, frp.dest);
      return;
    }

    // CheckUnresolved
    note("unresolved", self, std::nullopt, frp.dest, std::nullopt,
         fmt::format("suspect:{}", check.session.current_suspect));
    next_reply(self, frp.dest);
  }

  // Route through the reliable target directly when it is a radio neighbour.
  bool reroute_via_target(NodeId self, NodeId dest, NodeId target) {
    Node& n = nodes[self.value];
    if (!adjacent(self, target) || n.blacklist.contains(target)) return false;
    const RoutingTableEntry* known = n.aodv.route(dest);
    const RoutingTableEntry entry{
        .dest = dest,
        .next_hop = target,
        .hop_count = target == dest ? 1u : 2u,
        .dest_seq = known ? known->dest_seq : 0,
        .valid = true,
        .generator = target,
    };
    if (!n.aodv.install(entry)) return false;
    note("accept", self, std::nullopt, dest, std::nullopt, fmt::format("via:{},generator:{},check:reroute", target, target));
    note_route(self, entry);
    complete_discovery(self, dest);
    return true;
  }

  void raise_alarm(NodeId self, const std::set<NodeId>& black_holes) {
    Node& n = nodes[self.value];
    const Alarm alarm{.reporter = self, .black_holes = black_holes, .alarm_id = n.next_alarm_id++};
    receive(self, alarm, self);
  }

  void receive(NodeId self, const Alarm& alarm, NodeId) {
    Node& n = nodes[self.value];
    const AlarmOutcome out = propagate_alarm(alarm, n.blacklist);
    if (!out.rebroadcast) return;
    note("alarm", self, std::nullopt, std::nullopt, std::nullopt, fmt::format("blackholes:{}", join_ids(alarm.black_holes)));
    if (n.black_hole) return;  // listens, never relays
    if (!out.newly_listed.empty()) isolate(self);
    broadcast(self, alarm);
  }

  // Forget every route that leads through, or was advertised by, a listed node.
  void isolate(NodeId self) {
    Node& n = nodes[self.value];
    const Blacklist& bl = n.blacklist;
    n.aodv.purge_routes(
        [&](const RoutingTableEntry& e) { return bl.contains(e.next_hop) || bl.contains(e.generator); });
    for (auto& [dest, d] : n.discoveries) {
      std::erase_if(d.queued, [&](const Reply& r) { return bl.contains(r.from) || bl.contains(r.rrep.generator); });
    }
  }

  void begin_discovery(NodeId self, const Rreq& rreq) {
    Discovery d;
    d.serial = ++discovery_serial;
    nodes[self.value].discoveries[rreq.dest] = std::move(d);
    schedule(now + cfg.discovery_timeout, DiscoveryTimeout{self, rreq.dest, discovery_serial});
    note("rreq", self, std::nullopt, rreq.dest, std::nullopt,
         fmt::format("bid:{},known_seq:{}", rreq.broadcast_id, rreq.dest_seq_known));
    broadcast(self, rreq);
  }

  void restart_discovery(NodeId self, NodeId dest) {
    Node& n = nodes[self.value];
    Discovery* d = discovery(self, dest);
    if (d == nullptr) return;
    if (d->attempts >= 1 + cfg.discovery_retries) {
      n.discoveries.erase(dest);
      note("giveup", self, std::nullopt, dest);
      for (const DataPacket& pkt : n.aodv.finish_discovery(dest)) drop(self, pkt, "no_route");
      return;
    }
    ++d->attempts;
    d->serial = ++discovery_serial;
    d->window_scheduled = false;
    d->check.reset();
    d->queued.clear();
    const Rreq rreq = n.aodv.originate_discovery(dest);
    schedule(now + cfg.discovery_timeout, DiscoveryTimeout{self, dest, d->serial});
    note("restart", self, std::nullopt, dest, std::nullopt, fmt::format("bid:{},attempt:{}", rreq.broadcast_id, d->attempts));
    broadcast(self, rreq);
  }

  void complete_discovery(NodeId self, NodeId dest) {
    Node& n = nodes[self.value];
    n.discoveries.erase(dest);
    for (const DataPacket& pkt : n.aodv.finish_discovery(dest)) originate_send(self, pkt);
  }

  // ---- data plane --------------------------------------------------------

  void originate_send(NodeId self, const DataPacket& pkt) {
    Node& n = nodes[self.value];
    for (int attempt = 0; attempt < 2; ++attempt) {
      auto result = n.aodv.forward_data(pkt);
      if (const auto* uni = std::get_if<DataUnicast>(&result)) {
        DataPacket out = pkt;
        out.hops = 1;
        if (unicast(self, uni->next_hop, out)) {
          note("send", self, std::nullopt, pkt.dest, pkt.pkt_id, fmt::format("next:{}", uni->next_hop));
          return;
        }
        link_failure(self, uni->next_hop);
        continue;
      }
      if (const auto* buf = std::get_if<DataBuffered>(&result)) {
        if (buf->evicted) drop(self, *buf->evicted, "buffer");
        if (buf->discovery) begin_discovery(self, *buf->discovery);
      }
      return;
    }
  }

  void confirm(NodeId prev, NodeId self) { dri_record_data_event(nodes[prev.value].dri, std::nullopt, self); }

  void receive(NodeId self, const DataPacket& pkt, NodeId from) {
    Node& n = nodes[self.value];
    if (pkt.dest == self) {
      dri_record_data_event(n.dri, from, std::nullopt);
      confirm(from, self);
      if (auto* m = metrics_for(pkt)) {
        ++m->delivered;
        m->bytes_delivered += pkt.payload_bytes;
      }
      note("deliver", self, from, pkt.dest, pkt.pkt_id);
      return;
    }
    if (n.black_hole) {
      n.bh.absorb(pkt);
      if (auto* m = metrics_for(pkt)) ++m->absorbed;
      note("absorb", self, std::nullopt, std::nullopt, pkt.pkt_id);
      return;
    }
    if (pkt.hops > cfg.num_nodes) {
      drop(self, pkt, "no_route");
      return;
    }
    auto result = n.aodv.forward_data(pkt);
    if (const auto* uni = std::get_if<DataUnicast>(&result)) {
      DataPacket out = pkt;
      ++out.hops;
      if (unicast(self, uni->next_hop, out)) {
        dri_record_data_event(n.dri, from, std::nullopt);
        confirm(from, self);
        note("forward", self, from, pkt.dest, pkt.pkt_id, fmt::format("next:{}", uni->next_hop));
        return;
      }
      link_failure(self, uni->next_hop);
    }
    drop(self, pkt, "no_route");
  }

  // ---- results -----------------------------------------------------------

  RunResult result() const {
    RunResult r;
    std::vector<FlowMetrics> per_flow = flow_metrics;
    for (const Event& ev : queue) {
      if (const auto* d = std::get_if<MsgDelivery>(&ev.kind)) {
        if (const auto* pkt = std::get_if<DataPacket>(&d->msg); pkt && !pkt->is_warmup()) {
          ++per_flow[pkt->flow].in_flight_at_end;
        }
      }
    }
    for (std::uint32_t f = 0; f < flows.size(); ++f) {
      per_flow[f].in_flight_at_end += nodes[flows[f].src.value].aodv.pending_count(flows[f].dst);
    }
    for (const FlowMetrics& m : per_flow) r.metrics.totals += m;
    r.metrics.per_flow = std::move(per_flow);
    r.metrics.duration = cfg.duration_seconds;
    finalize_metrics(r.metrics);

    r.trace = trace;
    r.flagged = flagged;
    r.alarms_raised = alarms_raised;
    for (const Node& n : nodes) {
      r.blacklists.push_back(n.blacklist.members());
      r.absorbed_by_node.push_back(n.bh.absorbed());
      r.forged_replies += n.bh.forged_replies();
    }
    r.events_executed = executed;
    return r;
  }
};

Engine::Engine(ScenarioConfig cfg, EngineOptions options) : impl_(std::make_unique<Impl>(std::move(cfg), options)) {}
Engine::~Engine() = default;
Engine::Engine(Engine&&) noexcept = default;
Engine& Engine::operator=(Engine&&) noexcept = default;

bool Engine::step() { return impl_->step(); }

void Engine::run_until(SimTime t) {
  while (!impl_->done && !impl_->queue.empty() && impl_->queue.front().at <= t) impl_->step();
}

RunResult Engine::run() {
  while (impl_->step()) {
  }
  return impl_->result();
}

bool Engine::finished() const { return impl_->done; }
RunResult Engine::result() const { return impl_->result(); }
SimTime Engine::now() const { return impl_->now; }
SimTime Engine::traffic_start() const { return impl_->t0; }
const ScenarioConfig& Engine::config() const { return impl_->cfg; }
std::span<const Position> Engine::positions() const { return impl_->positions; }
const std::vector<Flow>& Engine::flows() const { return impl_->flows; }
bool Engine::is_black_hole(NodeId id) const { return impl_->nodes.at(id.value).black_hole; }
const AodvNode& Engine::aodv(NodeId id) const { return impl_->nodes.at(id.value).aodv; }
const DriTable& Engine::dri(NodeId id) const { return impl_->nodes.at(id.value).dri; }
DriTable& Engine::dri(NodeId id) { return impl_->nodes.at(id.value).dri; }
const Blacklist& Engine::blacklist(NodeId id) const { return impl_->nodes.at(id.value).blacklist; }

RunResult run_scenario(const ScenarioConfig& cfg, EngineOptions options) { return Engine(cfg, options).run(); }

}  // namespace bhsim
