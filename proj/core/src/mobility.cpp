#include "bhsim/mobility.hpp"

#include <algorithm>
#include <cmath>

namespace bhsim {

Position uniform_position(const Area& area, Rng& rng) {
  std::uniform_real_distribution<double> ux(0.0, area.width);
  std::uniform_real_distribution<double> uy(0.0, area.height);
  const double x = ux(rng);
  const double y = uy(rng);
  return Position{x, y};
}

std::optional<SimTime> waypoint_step(WaypointState& state, const WaypointParams& params, SimTime now, Rng& rng) {
  if (params.speed <= 0.0) return std::nullopt;

  if (state.pausing_until) {
    if (now < *state.pausing_until) return now + params.tick;
    state.pausing_until.reset();
    state.waypoint = uniform_position(params.area, rng);
    state.speed = params.speed;
    return now + params.tick;
  }

  const double dx = state.waypoint.x - state.position.x;
  const double dy = state.waypoint.y - state.position.y;
  const double remaining = std::hypot(dx, dy);
  const double step = state.speed * params.tick;
  if (remaining <= step) {
    state.position = state.waypoint;
    state.pausing_until = now + params.pause_seconds;
  } else {
    state.position.x += dx / remaining * step;
    state.position.y += dy / remaining * step;
  }
  state.position.x = std::clamp(state.position.x, 0.0, params.area.width);
  state.position.y = std::clamp(state.position.y, 0.0, params.area.height);
  return now + params.tick;
}

}  // namespace bhsim
