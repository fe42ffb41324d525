// Acceptance suite: one PASS/FAIL line per criterion, non-zero exit on any FAIL.

#include <fmt/format.h>
#include <fmt/ranges.h>

#include <chrono>
#include <functional>
#include <map>
#include <numeric>
#include <string>
#include <vector>

#include "bhsim/aodv.hpp"
#include "bhsim/dri.hpp"
#include "bhsim/matrix.hpp"
#include "support/scenarios.hpp"

using namespace bhsim;
using namespace bhsim::testing;

namespace {

struct Verdict {
  bool pass = true;
  std::string detail;

  void require(bool ok, const std::string& why) {
    if (!ok && pass) {
      pass = false;
      detail = why;
    }
  }
};

// Every run of criteria 1-6 lands here for the conservation check.
std::vector<std::string> conservation_failures;
std::size_t conservation_checked = 0;

RunResult checked(RunResult r, const std::string& label) {
  ++conservation_checked;
  if (!r.metrics.totals.conserved()) conservation_failures.push_back(label);
  for (const auto& f : r.metrics.per_flow) {
    if (!f.conserved()) {
      conservation_failures.push_back(label + " (per flow)");
      break;
    }
  }
  return r;
}

RunResult run_cell(double speed, Mode mode, std::uint64_t seed) {
  return checked(run_scenario(paper_cell(speed, mode, seed)),
                 fmt::format("speed={} mode={} seed={}", speed, mode_name(mode), seed));
}

const std::vector<std::uint64_t> kSeeds = {1, 2, 3, 4, 5, 6, 7, 8, 9, 10};

double mean(const std::vector<double>& v) { return std::accumulate(v.begin(), v.end(), 0.0) / double(v.size()); }

Verdict clean_baseline() {
  Verdict v;
  double slowest = 0.0;
  for (auto seed : kSeeds) {
    const auto start = std::chrono::steady_clock::now();
    const RunResult r = run_cell(0.0, Mode::clean, seed);
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    slowest = std::max(slowest, secs);
    v.require(r.metrics.pdr == 1.0, fmt::format("seed {} pdr {:.6f}", seed, r.metrics.pdr));
    v.require(secs < 1.0, fmt::format("seed {} took {:.3f} s", seed, secs));
  }
  if (v.pass) v.detail = fmt::format("pdr 1.000000 on {} seeds, slowest run {:.3f} s", kSeeds.size(), slowest);
  return v;
}

struct SpeedRuns {
  std::vector<RunResult> clean, attack, detection;
};

SpeedRuns runs_at(double speed, bool with_detection) {
  SpeedRuns s;
  for (auto seed : kSeeds) {
    s.clean.push_back(run_cell(speed, Mode::clean, seed));
    s.attack.push_back(run_cell(speed, Mode::attack, seed));
    if (with_detection) s.detection.push_back(run_cell(speed, Mode::attack_detection, seed));
  }
  return s;
}

std::vector<double> pdrs(const std::vector<RunResult>& runs) {
  std::vector<double> out;
  for (const auto& r : runs) out.push_back(r.metrics.pdr);
  return out;
}

Verdict attack_impact(const SpeedRuns& s) {
  Verdict v;
  const double clean = mean(pdrs(s.clean));
  const double attack = mean(pdrs(s.attack));
  v.require(attack <= clean - 0.10, fmt::format("mean pdr clean {:.4f} attack {:.4f}", clean, attack));
  if (v.pass) {
    v.detail = fmt::format("speed 10: mean pdr clean {:.4f}, attack {:.4f} (drop {:.4f}); reference attack pdr 0.82",
                           clean, attack, clean - attack);
  }
  return v;
}

Verdict sweep_ordering(const std::map<double, SpeedRuns>& by_speed) {
  Verdict v;
  std::size_t cells = 0;
  for (const auto& [speed, s] : by_speed) {
    for (std::size_t i = 0; i < kSeeds.size(); ++i) {
      const auto& c = s.clean[i].metrics;
      const auto& a = s.attack[i].metrics;
      v.require(a.pdr <= c.pdr,
                fmt::format("speed {} seed {}: pdr attack {:.4f} > clean {:.4f}", speed, kSeeds[i], a.pdr, c.pdr));
      v.require(a.throughput_bps <= c.throughput_bps,
                fmt::format("speed {} seed {}: throughput attack {:.1f} > clean {:.1f}", speed, kSeeds[i],
                            a.throughput_bps, c.throughput_bps));
      ++cells;
    }
  }
  if (v.pass) v.detail = fmt::format("attack <= clean for pdr and throughput in all {} (speed, seed) cells", cells);
  return v;
}

Verdict detection_recovery(const SpeedRuns& s) {
  Verdict v;
  const double attack = mean(pdrs(s.attack));
  const double detect = mean(pdrs(s.detection));
  v.require(detect >= attack + 0.05, fmt::format("mean pdr attack {:.4f} detection {:.4f}", attack, detect));
  std::set<NodeId> flagged;
  for (const auto& r : s.detection) flagged.insert(r.flagged.begin(), r.flagged.end());
  const std::set<NodeId> members = paper_scenario().attack.members;
  for (NodeId f : flagged) v.require(members.contains(f), fmt::format("honest node {} flagged", f));
  if (v.pass) {
    v.detail = fmt::format("speed 10: mean pdr attack {:.4f}, attack+detection {:.4f}; flagged {{{}}}", attack, detect,
                           fmt::join(flagged, ","));
  }
  return v;
}

Verdict fig3() {
  Verdict v;
  const RunResult plain = checked(run_fig3(false), "fig3 without detection");
  const auto& p = plain.metrics.totals;
  v.require(p.originated > 0, "no traffic");
  v.require(p.absorbed == p.originated && p.delivered == 0,
            fmt::format("without detection: originated {} absorbed {} delivered {}", p.originated, p.absorbed,
                        p.delivered));

  const RunResult guarded = checked(run_fig3(true, true), "fig3 with detection");
  const auto& g = guarded.metrics.totals;
  v.require(guarded.flagged == std::set<NodeId>{Fig3::M}, "M not flagged alone");
  v.require(guarded.absorbed_by_node[Fig3::M.value] == 0, "data transited M");
  v.require(g.delivered > 0 && g.delivered == g.originated,
            fmt::format("with detection: delivered {} of {}", g.delivered, g.originated));
  // The flag must precede the first data packet leaving A.
  double flag_at = -1.0, first_send = -1.0;
  for (const auto& e : guarded.trace) {
    if (e.ev == "flag" && flag_at < 0) flag_at = e.t;
    if (e.ev == "send" && first_send < 0) first_send = e.t;
  }
  v.require(flag_at >= 0 && first_send >= 0 && flag_at <= first_send, "flag did not precede the first data send");
  if (v.pass) {
    v.detail = fmt::format("plain: {} of {} absorbed by M; guarded: M flagged at t={:.6f}, {} of {} delivered",
                           p.absorbed, p.originated, flag_at, g.delivered, g.originated);
  }
  return v;
}

Verdict cooperative_pair() {
  Verdict v;
  const RunResult r = checked(run_coop(), "cooperative pair");
  const std::set<NodeId> pair{Coop::B1, Coop::B2};
  v.require(r.flagged == pair, fmt::format("flagged {{{}}}", fmt::join(r.flagged, ",")));
  for (std::size_t n = 0; n < r.blacklists.size(); ++n) {
    v.require(r.blacklists[n] == pair, fmt::format("node {} blacklist {{{}}}", n, fmt::join(r.blacklists[n], ",")));
  }
  if (v.pass) {
    v.detail = fmt::format("both flagged; blacklisted at all {} nodes; delivered {} of {}", r.blacklists.size(),
                           r.metrics.totals.delivered, r.metrics.totals.originated);
  }
  return v;
}

Verdict loop_freedom() {
  Verdict v;
  for (std::uint64_t seed = 1; seed <= 100; ++seed) {
    ScenarioConfig cfg;
    cfg.num_nodes = 8;
    cfg.area = Area{500, 500};
    cfg.duration_seconds = 5.0;
    cfg.cbr.num_random_flows = 6;
    cfg.seed = seed;
    Engine engine(cfg);
    std::uint64_t events = 0;
    bool looped = false;
    while (engine.step()) {
      if (++events % 25 == 0 && any_route_loops(engine)) looped = true;
    }
    if (any_route_loops(engine)) looped = true;
    v.require(!looped, fmt::format("routing loop in scenario seed {}", seed));
  }
  if (v.pass) v.detail = "no next-hop cycle in 100 scenarios, checked every 25 events";
  return v;
}

Verdict truth_table() {
  Verdict v;
  std::size_t cases = 0;
  const NodeId source{0}, suspect{1}, target{2}, dest{3};
  for (int claimed = 0; claimed < 4; ++claimed) {
    for (int reported = 0; reported < 4; ++reported) {
      for (bool reliable : {true, false}) {
        const DriEntry claim{bool(claimed & 2), bool(claimed & 1)};
        const DriEntry report{bool(reported & 2), bool(reported & 1)};
        DriTable dri(source);
        if (reliable) dri.mark_through(target);
        CrossCheckSession session{source, dest, suspect, target, claim, {suspect}, 1, 8};
        const Frp frp{target, source, dest, report, NodeId{4}, DriEntry{false, false}};
        const CheckOutcome out = handle_frp_at_source(session, frp, dri);
        const std::string label = fmt::format("claim {}{} report {}{} reliable {}", int(claim.from),
                                              int(claim.through), int(report.from), int(report.through), reliable);
        if (!reliable) {
          v.require(std::holds_alternative<CheckContinues>(out), label + ": expected the chain to move on");
        } else if (claim.through && !report.from) {
          v.require(std::holds_alternative<BlackHolesFound>(out), label + ": expected black hole");
        } else {
          v.require(std::holds_alternative<SuspectCleared>(out), label + ": expected cleared");
          v.require(dri.lookup(suspect).through, label + ": suspect not marked through");
        }
        ++cases;
      }
    }
  }
  if (v.pass) v.detail = fmt::format("{} cases: black hole iff reliable target, claimed through 1, reported from 0", cases);
  return v;
}

Verdict conservation() {
  Verdict v;
  v.require(conservation_checked > 0, "no runs recorded");
  for (const auto& f : conservation_failures) v.require(false, "not conserved: " + f);
  if (v.pass) v.detail = fmt::format("originated = delivered + absorbed + drops + in flight on {} runs", conservation_checked);
  return v;
}

Verdict determinism() {
  Verdict v;
  ExperimentMatrix m;
  m.base = paper_scenario();
  m.base.detection.warmup_flows = 2;
  m.speeds = {0.0, 10.0};
  m.modes = {Mode::clean, Mode::attack, Mode::attack_detection};
  m.seeds = {1, 2};
  auto render = [&](unsigned jobs) {
    const auto cells = run_cells(m, MatrixOptions{true, jobs});
    std::vector<SweepRecord> records;
    std::string traces;
    for (const auto& c : cells) {
      records.push_back(c.record);
      for (const auto& e : c.run.trace) traces += format_trace_line(e) + '\n';
    }
    return std::pair{summary_csv(records), traces};
  };
  const auto first = render(1);
  const auto second = render(1);
  const auto parallel = render(2);
  v.require(first.first == second.first, "summary CSV differs between runs");
  v.require(first.second == second.second, "traces differ between runs");
  v.require(first == parallel, "parallel run differs");

  // A single cell reproduces its row.
  const auto lone = run_scenario(cell_config(m.base, 10.0, Mode::attack, 2));
  const auto row = summary_row(SweepRecord{10.0, Mode::attack, 2, lone.metrics});
  v.require(first.first.find(row + '\n') != std::string::npos, "isolated cell row differs");
  if (v.pass) {
    v.detail = fmt::format("{} rows, {} trace bytes identical across repeats and --jobs 2",
                           m.speeds.size() * m.modes.size() * m.seeds.size(), first.second.size());
  }
  return v;
}

Verdict dest_seq_rule() {
  Verdict v;
  struct Case {
    SeqNum current, requested, expected;
  };
  for (const Case c : {Case{5, 7, 8}, Case{10, 3, 10}, Case{4, 4, 5}}) {
    AodvNode dest(NodeId{1});
    while (dest.own_seq() < c.current) (void)dest.make_dest_rrep(Rreq{NodeId{0}, 0, 0, NodeId{1}, dest.own_seq(), 0});
    const Rrep r = dest.make_dest_rrep(Rreq{NodeId{0}, 1, 1, NodeId{1}, c.requested, 0});
    v.require(r.dest_seq == c.expected,
              fmt::format("current {} requested {}: got {} want {}", c.current, c.requested, r.dest_seq, c.expected));
  }
  if (v.pass) v.detail = "(5,7)->8, (10,3)->10, (4,4)->5";
  return v;
}

}  // namespace

int main() {
  std::vector<std::pair<std::string, std::function<Verdict()>>> criteria;
  std::map<double, SpeedRuns> by_speed;
  for (double speed : {0.0, 5.0, 10.0, 15.0, 20.0}) by_speed[speed] = runs_at(speed, speed == 10.0);

  criteria.emplace_back("1 clean baseline exactness", clean_baseline);
  criteria.emplace_back("2 attack impact", [&] { return attack_impact(by_speed.at(10.0)); });
  criteria.emplace_back("3 sweep ordering", [&] { return sweep_ordering(by_speed); });
  criteria.emplace_back("4 detection recovery", [&] { return detection_recovery(by_speed.at(10.0)); });
  criteria.emplace_back("5 fig-3 scenario", fig3);
  criteria.emplace_back("6 cooperative pair", cooperative_pair);
  criteria.emplace_back("7a loop freedom", loop_freedom);
  criteria.emplace_back("7b dri truth table", truth_table);
  criteria.emplace_back("7c conservation", conservation);
  criteria.emplace_back("7d determinism", determinism);
  criteria.emplace_back("8 destination sequence rule", dest_seq_rule);

  int failed = 0;
  for (const auto& [name, check] : criteria) {
    Verdict v;
    try {
      v = check();
    } catch (const std::exception& e) {
      v = Verdict{false, fmt::format("exception: {}", e.what())};
    }
    if (!v.pass) ++failed;
    fmt::print("{} criterion {}: {}\n", v.pass ? "PASS" : "FAIL", name, v.detail);
  }
  return failed == 0 ? 0 : 1;
}
