#include "bhsim/scenario.hpp"

#include <fmt/format.h>

#include <cmath>
#include <set>

namespace bhsim {

ScenarioConfig paper_scenario() {
  ScenarioConfig cfg;
  cfg.attack.members = {NodeId{23}, NodeId{24}};
  return cfg;
}

namespace {

void require(bool ok, const std::string& what) {
  if (!ok) throw ScenarioError(what);
}

bool finite_positive(double v) { return std::isfinite(v) && v > 0.0; }

}  // namespace

void validate_scenario(const ScenarioConfig& cfg) {
  require(cfg.num_nodes > 0, "num_nodes must be positive");
  require(finite_positive(cfg.area.width) && finite_positive(cfg.area.height), "area must be positive");
  require(finite_positive(cfg.radio_range), "radio_range must be positive");
  require(std::isfinite(cfg.speed) && cfg.speed >= 0.0, "speed must be non-negative");
  require(std::isfinite(cfg.pause_seconds) && cfg.pause_seconds >= 0.0, "pause_seconds must be non-negative");
  require(finite_positive(cfg.mobility_tick), "mobility.tick must be positive");
  require(finite_positive(cfg.duration_seconds), "duration_seconds must be positive");
  require(std::isfinite(cfg.drain_seconds) && cfg.drain_seconds >= 0.0, "drain_seconds must be non-negative");
  require(finite_positive(cfg.latency), "latency must be positive");
  require(std::isfinite(cfg.rrep_window_seconds) && cfg.rrep_window_seconds >= 0.0,
          "rrep_window_seconds must be non-negative");
  require(finite_positive(cfg.discovery_timeout), "discovery.timeout must be positive");
  require(finite_positive(cfg.cbr.rate_pps), "cbr.rate_pps must be positive");
  require(cfg.cbr.payload_bytes > 0, "cbr.payload_bytes must be positive");

  for (NodeId m : cfg.attack.members) {
    require(m.value < cfg.num_nodes, fmt::format("attack member {} out of range", m));
  }
  if (cfg.attack.enabled) {
    require(!cfg.attack.members.empty(), "attack enabled with no members");
    require(cfg.attack.seq_inflation >= 1, "attack.seq_inflation must be at least 1");
    require(std::isfinite(cfg.attack.respond_delay_seconds) && cfg.attack.respond_delay_seconds >= 0.0,
            "attack.respond_delay must be non-negative");
  }

  std::set<Flow> distinct;
  for (const Flow& f : cfg.cbr.flows) {
    require(f.src.value < cfg.num_nodes && f.dst.value < cfg.num_nodes,
            fmt::format("flow {}>{} names a node out of range", f.src, f.dst));
    require(f.src != f.dst, fmt::format("flow {}>{} has src equal to dst", f.src, f.dst));
    distinct.insert(f);
  }
  if (cfg.cbr.flows.empty()) {
    const std::uint64_t honest = cfg.num_nodes - cfg.attack.members.size();
    require(honest * (honest > 0 ? honest - 1 : 0) >= cfg.cbr.num_random_flows,
            "cbr.num_flows exceeds the number of distinct honest pairs");
  }

  if (!cfg.positions.empty()) {
    require(cfg.positions.size() == cfg.num_nodes, "positions must list exactly num_nodes entries");
    for (const Position& p : cfg.positions) {
      require(cfg.area.contains(p), fmt::format("position ({}, {}) lies outside the area", p.x, p.y));
    }
  }
}

}  // namespace bhsim
