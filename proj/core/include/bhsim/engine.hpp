#pragma once

// Deterministic discrete-event engine: simulated clock, event queue, unit-disk
// radio, random-waypoint mobility and CBR traffic, wiring honest, black-hole
// and detection-enabled node behaviour together.

#include <cstdint>
#include <memory>
#include <set>
#include <span>
#include <vector>

#include "bhsim/aodv.hpp"
#include "bhsim/dri.hpp"
#include "bhsim/metrics.hpp"
#include "bhsim/scenario.hpp"
#include "bhsim/trace.hpp"

namespace bhsim {

struct EngineOptions {
  bool trace = false;
};

struct RunResult {
  MetricsRecord metrics;
  std::vector<TraceEvent> trace;
  /// Union of every black-hole set a source announced.
  std::set<NodeId> flagged;
  std::uint64_t alarms_raised = 0;
  /// Blacklist held by each node at the end of the run.
  std::vector<std::set<NodeId>> blacklists;
  /// Data packets absorbed by each node (non-zero only for black holes).
  std::vector<std::uint64_t> absorbed_by_node;
  std::uint64_t forged_replies = 0;
  std::uint64_t events_executed = 0;
};

/// Length of the warm-up phase that seeds DRI tables before measured traffic.
inline constexpr SimTime kWarmupPhaseSeconds = 2.0;
inline constexpr std::uint32_t kWarmupPacketsPerFlow = 3;

class Engine {
 public:
  /// Validates the configuration (ScenarioError) and schedules the run.
  explicit Engine(ScenarioConfig cfg, EngineOptions options = {});
  ~Engine();
  Engine(Engine&&) noexcept;
  Engine& operator=(Engine&&) noexcept;

  /// Executes one event; returns false once the run has ended.
  bool step();
  /// Executes every event scheduled at or before `t`.
  void run_until(SimTime t);
  RunResult run();
  bool finished() const;
  RunResult result() const;

  SimTime now() const;
  SimTime traffic_start() const;
  const ScenarioConfig& config() const;
  std::span<const Position> positions() const;
  const std::vector<Flow>& flows() const;
  bool is_black_hole(NodeId id) const;
  const AodvNode& aodv(NodeId id) const;
  const DriTable& dri(NodeId id) const;
  /// Mutable access, e.g. to seed routing history before the run starts.
  DriTable& dri(NodeId id);
  const Blacklist& blacklist(NodeId id) const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

RunResult run_scenario(const ScenarioConfig& cfg, EngineOptions options = {});

}  // namespace bhsim
