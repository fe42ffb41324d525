#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "bhsim/adversary.hpp"
#include "bhsim/mobility.hpp"
#include "bhsim/traffic.hpp"

namespace bhsim {

struct CbrConfig {
  /// Explicit flows; when empty, `num_random_flows` distinct honest pairs are drawn.
  std::vector<Flow> flows;
  std::uint32_t num_random_flows = 10;
  double rate_pps = 4.0;
  std::uint32_t payload_bytes = 512;
};

struct DetectionConfig {
  bool enabled = false;
  /// Cross-check round limit; 0 means "number of nodes".
  std::uint32_t max_rounds = 0;
  /// Warm-up flows per honest node used to seed DRI tables before traffic starts.
  std::uint32_t warmup_flows = 0;
};

struct ScenarioConfig {
  std::uint32_t num_nodes = 30;
  Area area{500.0, 500.0};
  double radio_range = 250.0;
  double speed = 0.0;
  double pause_seconds = 30.0;
  double mobility_tick = 0.1;
  CbrConfig cbr;
  double duration_seconds = 100.0;
  /// Extra time after traffic stops during which in-flight packets may still arrive.
  double drain_seconds = 1.0;
  std::uint64_t seed = 1;
  BlackHoleConfig attack;
  DetectionConfig detection;
  double rrep_window_seconds = 0.0;
  double latency = 0.002;
  bool gratuitous_rrep = false;
  double discovery_timeout = 0.5;
  std::uint32_t discovery_retries = 3;
  /// Redraw random placements until the radio graph is connected.
  bool require_connected = true;
  /// Explicit initial positions (one per node); random placement when empty.
  std::vector<Position> positions;

  std::uint32_t effective_max_rounds() const {
    return detection.max_rounds == 0 ? num_nodes : detection.max_rounds;
  }
};

/// Paper-scale defaults: 30 nodes, 500x500 m, 250 m range, 30 s pause, 512 B CBR,
/// black holes 23 and 24 (attack disabled until a mode enables it).
ScenarioConfig paper_scenario();

class ScenarioError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Throws ScenarioError describing the first violated invariant.
void validate_scenario(const ScenarioConfig& cfg);

}  // namespace bhsim
