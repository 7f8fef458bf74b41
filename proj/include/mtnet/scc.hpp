#pragma once

// Strongly connected components (iterative Tarjan, no recursion-depth limit),
// per-component directed diameters by all-pairs BFS inside the component, and
// the diameter histogram over non-singleton components.

#include <algorithm>
#include <cstdint>
#include <deque>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <unordered_set>
#include <vector>

#include "mtnet/error.hpp"
#include "mtnet/network.hpp"

namespace mtnet {

struct SccComponent {
  std::vector<std::uint32_t> nodes;  // ascending node indices
  std::size_t user_count = 0;
  std::string token;  // single token per component (token-layer closure)
  bool has_ego_group = false;
  std::optional<std::uint32_t> diameter;  // filled for size >= 2
};

struct SccSummary {
  std::vector<SccComponent> components;  // descending size, then min node index
};

// Components of the directed network. The ego-group flag marks components
// containing an entity from `group`; with no group given it falls back to the
// nodes' own ego flags.
inline SccSummary scc_decomposition(
    const MultiTokenNetwork& net,
    const std::optional<std::unordered_set<std::string>>& group = std::nullopt) {
  const std::size_t n = net.node_count();
  constexpr std::uint32_t kUnvisited = 0xffffffff;
  std::vector<std::uint32_t> index(n, kUnvisited), lowlink(n, 0), component(n, kUnvisited);
  std::vector<char> on_stack(n, 0);
  std::vector<std::uint32_t> stack;
  std::uint32_t next_index = 0;
  std::uint32_t component_count = 0;

  struct Frame {
    std::uint32_t node;
    std::size_t edge_pos;
  };
  std::vector<Frame> call_stack;

  for (std::uint32_t root = 0; root < n; ++root) {
    if (index[root] != kUnvisited) continue;
    call_stack.push_back({root, 0});
    index[root] = lowlink[root] = next_index++;
    stack.push_back(root);
    on_stack[root] = 1;

    while (!call_stack.empty()) {
      Frame& frame = call_stack.back();
      const auto& out = net.out_edges(frame.node);
      if (frame.edge_pos < out.size()) {
        std::uint32_t next = net.edges()[out[frame.edge_pos]].dst;
        ++frame.edge_pos;
        if (index[next] == kUnvisited) {
          index[next] = lowlink[next] = next_index++;
          stack.push_back(next);
          on_stack[next] = 1;
          call_stack.push_back({next, 0});
        } else if (on_stack[next]) {
          lowlink[frame.node] = std::min(lowlink[frame.node], index[next]);
        }
      } else {
        std::uint32_t v = frame.node;
        call_stack.pop_back();
        if (!call_stack.empty())
          lowlink[call_stack.back().node] = std::min(lowlink[call_stack.back().node], lowlink[v]);
        if (lowlink[v] == index[v]) {
          while (true) {
            std::uint32_t w = stack.back();
            stack.pop_back();
            on_stack[w] = 0;
            component[w] = component_count;
            if (w == v) break;
          }
          ++component_count;
        }
      }
    }
  }

  std::vector<SccComponent> comps(component_count);
  for (std::uint32_t i = 0; i < n; ++i) comps[component[i]].nodes.push_back(i);

  for (auto& comp : comps) {
    std::sort(comp.nodes.begin(), comp.nodes.end());
    std::unordered_set<std::string_view> users;
    for (std::uint32_t node : comp.nodes) {
      users.insert(net.node(node).entity);
      bool in_group = group ? group->count(net.node(node).entity) > 0 : net.node(node).is_ego;
      if (in_group) comp.has_ego_group = true;
    }
    comp.user_count = users.size();
    comp.token = net.node(comp.nodes.front()).token;
    for (std::uint32_t node : comp.nodes)
      if (net.node(node).token != comp.token)
        throw Error("component spans token layers; network invariant violated");
  }
  std::sort(comps.begin(), comps.end(), [](const SccComponent& a, const SccComponent& b) {
    if (a.nodes.size() != b.nodes.size()) return a.nodes.size() > b.nodes.size();
    return a.nodes.front() < b.nodes.front();
  });
  return {std::move(comps)};
}

// Longest directed shortest path within the component, hop counts only.
// Throws if the node set is not strongly connected or has fewer than 2 nodes.
inline std::uint32_t scc_diameter(const MultiTokenNetwork& net,
                                  std::span<const std::uint32_t> component_nodes) {
  if (component_nodes.size() < 2)
    throw Error("diameter needs a component with at least 2 nodes");
  std::unordered_set<std::uint32_t> members(component_nodes.begin(), component_nodes.end());
  std::vector<std::uint32_t> dist(net.node_count());
  std::uint32_t diameter = 0;
  std::deque<std::uint32_t> queue;
  for (std::uint32_t source : component_nodes) {
    constexpr std::uint32_t kInf = 0xffffffff;
    for (std::uint32_t node : component_nodes) dist[node] = kInf;
    dist[source] = 0;
    queue.clear();
    queue.push_back(source);
    std::size_t reached = 1;
    while (!queue.empty()) {
      std::uint32_t v = queue.front();
      queue.pop_front();
      for (std::uint32_t edge : net.out_edges(v)) {
        std::uint32_t w = net.edges()[edge].dst;
        if (!members.count(w) || dist[w] != kInf) continue;
        dist[w] = dist[v] + 1;
        diameter = std::max(diameter, dist[w]);
        queue.push_back(w);
        ++reached;
      }
    }
    if (reached != component_nodes.size())
      throw Error("node set is not strongly connected");
  }
  return diameter;
}

inline void compute_scc_diameters(const MultiTokenNetwork& net, SccSummary& summary) {
  for (auto& comp : summary.components)
    if (comp.nodes.size() >= 2) comp.diameter = scc_diameter(net, comp.nodes);
}

struct DiameterDistribution {
  std::map<std::uint32_t, std::size_t> histogram;  // diameter -> component count
  std::size_t nonsingleton_components = 0;
  double ego_group_fraction = 0.0;  // share of non-singleton components with the group
};

// Histogram over non-singleton components; singletons stay in the partition
// but carry no diameter.
inline DiameterDistribution diameter_distribution(const SccSummary& summary) {
  DiameterDistribution out;
  std::size_t with_group = 0;
  for (const auto& comp : summary.components) {
    if (comp.nodes.size() < 2) continue;
    if (!comp.diameter)
      throw Error("diameter not computed; call compute_scc_diameters first");
    ++out.histogram[*comp.diameter];
    ++out.nonsingleton_components;
    if (comp.has_ego_group) ++with_group;
  }
  if (out.nonsingleton_components > 0)
    out.ego_group_fraction =
        static_cast<double>(with_group) / static_cast<double>(out.nonsingleton_components);
  return out;
}

}  // namespace mtnet
