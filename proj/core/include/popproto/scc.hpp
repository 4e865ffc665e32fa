#pragma once

#include <cstdint>
#include <vector>

namespace popproto {

/// Adjacency lists; node ids are indices.
using Digraph = std::vector<std::vector<std::uint32_t>>;

/// Tarjan's decomposition, iterative. Components come out in reverse
/// topological order; nodes within a component are sorted.
std::vector<std::vector<std::uint32_t>> strongly_connected_components(const Digraph& graph);

/// Components with no edge leaving them. Self-loops are irrelevant.
/// Sorted by smallest member.
std::vector<std::vector<std::uint32_t>> bottom_sccs(const Digraph& graph);

}  // namespace popproto
