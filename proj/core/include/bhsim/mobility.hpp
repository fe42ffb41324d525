#pragma once

#include <optional>

#include "bhsim/rng.hpp"
#include "bhsim/types.hpp"

namespace bhsim {

struct Area {
  double width = 500.0;
  double height = 500.0;

  bool contains(Position p) const { return p.x >= 0.0 && p.x <= width && p.y >= 0.0 && p.y <= height; }
};

/// Random-waypoint state of one node.
struct WaypointState {
  Position position;
  Position waypoint;
  double speed = 0.0;
  /// Set while the node rests; the node picks a new waypoint once `now` reaches it.
  std::optional<SimTime> pausing_until;
};

struct WaypointParams {
  Area area;
  double speed = 0.0;
  double pause_seconds = 30.0;
  double tick = 0.1;
};

Position uniform_position(const Area& area, Rng& rng);

/// Advances one node by one tick ending at `now`. Returns the time of the next
/// update, or nullopt when the node can never move (speed 0).
std::optional<SimTime> waypoint_step(WaypointState& state, const WaypointParams& params, SimTime now, Rng& rng);

}  // namespace bhsim
