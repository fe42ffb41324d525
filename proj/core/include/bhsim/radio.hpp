#pragma once

// Unit-disk radio: two nodes hear each other iff their distance is at most the
// radio range (boundary inclusive).

#include <optional>
#include <set>
#include <span>
#include <vector>

#include "bhsim/types.hpp"

namespace bhsim {

bool in_range(Position a, Position b, double range);

/// Every other node within `range` of `node`, in ascending id order.
std::vector<NodeId> neighbors(std::span<const Position> positions, NodeId node, double range);

bool is_connected(std::span<const Position> positions, double range);

/// Fewest-hop path from `from` to `to` that avoids every node in `excluded`
/// (endpoints excepted). Ties resolve toward lower node ids. The returned path
/// includes both endpoints.
std::optional<std::vector<NodeId>> shortest_path(std::span<const Position> positions, double range, NodeId from,
                                                 NodeId to, const std::set<NodeId>& excluded);

}  // namespace bhsim
