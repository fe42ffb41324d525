#include "bhsim/radio.hpp"

#include <algorithm>
#include <deque>
#include <limits>

namespace bhsim {

bool in_range(Position a, Position b, double range) { return squared_distance(a, b) <= range * range; }

std::vector<NodeId> neighbors(std::span<const Position> positions, NodeId node, double range) {
  std::vector<NodeId> out;
  const Position self = positions[node.value];
  for (std::uint32_t i = 0; i < positions.size(); ++i) {
    if (i != node.value && in_range(self, positions[i], range)) out.emplace_back(i);
  }
  return out;
}

bool is_connected(std::span<const Position> positions, double range) {
  if (positions.empty()) return true;
  std::vector<bool> seen(positions.size(), false);
  std::deque<std::uint32_t> frontier{0};
  seen[0] = true;
  std::size_t reached = 1;
  while (!frontier.empty()) {
    const auto u = frontier.front();
    frontier.pop_front();
    for (std::uint32_t v = 0; v < positions.size(); ++v) {
      if (!seen[v] && in_range(positions[u], positions[v], range)) {
        seen[v] = true;
        ++reached;
        frontier.push_back(v);
      }
    }
  }
  return reached == positions.size();
}

std::optional<std::vector<NodeId>> shortest_path(std::span<const Position> positions, double range, NodeId from,
                                                 NodeId to, const std::set<NodeId>& excluded) {
  constexpr auto kNone = std::numeric_limits<std::uint32_t>::max();
  const auto n = static_cast<std::uint32_t>(positions.size());
  if (from.value >= n || to.value >= n) return std::nullopt;

  std::vector<std::uint32_t> parent(n, kNone);
  std::vector<bool> seen(n, false);
  std::deque<std::uint32_t> frontier{from.value};
  seen[from.value] = true;
  while (!frontier.empty()) {
    const auto u = frontier.front();
    frontier.pop_front();
    if (u == to.value) break;
    for (std::uint32_t v = 0; v < n; ++v) {
      if (seen[v] || !in_range(positions[u], positions[v], range)) continue;
      if (v != to.value && excluded.contains(NodeId{v})) continue;
      seen[v] = true;
      parent[v] = u;
      frontier.push_back(v);
    }
  }
  if (!seen[to.value]) return std::nullopt;

  std::vector<NodeId> path;
  for (auto v = to.value; v != kNone; v = parent[v]) path.emplace_back(v);
  std::reverse(path.begin(), path.end());
  return path;
}

}  // namespace bhsim
