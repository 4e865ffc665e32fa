#include "popproto/scc.hpp"

#include <algorithm>
#include <limits>

namespace popproto {

namespace {
constexpr std::uint32_t kUnvisited = std::numeric_limits<std::uint32_t>::max();
}

std::vector<std::vector<std::uint32_t>> strongly_connected_components(const Digraph& graph) {
  const auto n = static_cast<std::uint32_t>(graph.size());
  std::vector<std::uint32_t> index(n, kUnvisited), lowlink(n, 0);
  std::vector<bool> on_stack(n, false);
  std::vector<std::uint32_t> stack;
  std::vector<std::vector<std::uint32_t>> components;
  std::uint32_t counter = 0;

  struct Frame {
    std::uint32_t node;
    std::size_t next_edge;
  };
  std::vector<Frame> call;

  for (std::uint32_t root = 0; root < n; ++root) {
    if (index[root] != kUnvisited) continue;
    call.push_back({root, 0});
    index[root] = lowlink[root] = counter++;
    stack.push_back(root);
    on_stack[root] = true;

    while (!call.empty()) {
      auto& frame = call.back();
      auto v = frame.node;
      if (frame.next_edge < graph[v].size()) {
        auto w = graph[v][frame.next_edge++];
        if (index[w] == kUnvisited) {
          index[w] = lowlink[w] = counter++;
          stack.push_back(w);
          on_stack[w] = true;
          call.push_back({w, 0});
        } else if (on_stack[w]) {
          lowlink[v] = std::min(lowlink[v], index[w]);
        }
        continue;
      }
      if (lowlink[v] == index[v]) {
        std::vector<std::uint32_t> component;
        std::uint32_t w;
        do {
          w = stack.back();
          stack.pop_back();
          on_stack[w] = false;
          component.push_back(w);
        } while (w != v);
        std::sort(component.begin(), component.end());
        components.push_back(std::move(component));
      }
      call.pop_back();
      if (!call.empty()) {
        auto parent = call.back().node;
        lowlink[parent] = std::min(lowlink[parent], lowlink[v]);
      }
    }
  }
  return components;
}

std::vector<std::vector<std::uint32_t>> bottom_sccs(const Digraph& graph) {
  auto components = strongly_connected_components(graph);
  std::vector<std::uint32_t> component_of(graph.size());
  for (std::uint32_t c = 0; c < components.size(); ++c)
    for (auto v : components[c]) component_of[v] = c;

  std::vector<std::vector<std::uint32_t>> bottoms;
  for (std::uint32_t c = 0; c < components.size(); ++c) {
    bool closed = std::all_of(components[c].begin(), components[c].end(), [&](std::uint32_t v) {
      return std::all_of(graph[v].begin(), graph[v].end(), [&](std::uint32_t w) { return component_of[w] == c; });
    });
    if (closed) bottoms.push_back(std::move(components[c]));
  }
  std::sort(bottoms.begin(), bottoms.end());
  return bottoms;
}

}  // namespace popproto
