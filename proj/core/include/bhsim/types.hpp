#pragma once

#include <compare>
#include <cstdint>
#include <functional>

#include <fmt/format.h>

namespace bhsim {

/// Index of a node in the scenario's node list.
struct NodeId {
  std::uint32_t value = 0;

  constexpr NodeId() = default;
  constexpr explicit NodeId(std::uint32_t v) : value(v) {}

  friend constexpr auto operator<=>(NodeId, NodeId) = default;
};

/// Destination sequence number. Unbounded in the model; no wraparound.
using SeqNum = std::uint64_t;

/// Simulated time in seconds.
using SimTime = double;

struct Position {
  double x = 0.0;
  double y = 0.0;

  friend constexpr bool operator==(const Position&, const Position&) = default;
};

inline double squared_distance(Position a, Position b) {
  const double dx = a.x - b.x;
  const double dy = a.y - b.y;
  return dx * dx + dy * dy;
}

}  // namespace bhsim

template <>
struct std::hash<bhsim::NodeId> {
  std::size_t operator()(bhsim::NodeId id) const noexcept { return std::hash<std::uint32_t>{}(id.value); }
};

template <>
struct fmt::formatter<bhsim::NodeId> : fmt::formatter<std::uint32_t> {
  template <typename FormatContext>
  auto format(bhsim::NodeId id, FormatContext& ctx) const {
    return fmt::formatter<std::uint32_t>::format(id.value, ctx);
  }
};
