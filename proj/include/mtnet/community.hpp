#pragma once

// Louvain community detection on the undirected weighted projection of the
// network. Node visit order is shuffled by a seeded generator with a
// hand-rolled Fisher-Yates so partitions are identical across platforms;
// moves happen only on strictly positive modularity gain.

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <random>
#include <span>
#include <unordered_map>
#include <vector>

#include "mtnet/error.hpp"
#include "mtnet/network.hpp"

namespace mtnet {

struct UndirectedGraph {
  std::size_t n = 0;
  // each undirected edge {i, j} appears in both adjacency lists
  std::vector<std::vector<std::pair<std::uint32_t, double>>> adj;
  std::vector<double> self_loop;  // nonzero only in aggregated graphs

  double degree(std::uint32_t i) const {
    double d = 2.0 * self_loop[i];
    for (const auto& [j, w] : adj[i]) d += w;
    return d;
  }

  double two_m() const {
    double total = 0.0;
    for (std::uint32_t i = 0; i < n; ++i) total += degree(i);
    return total;
  }
};

// Undirected weight = sum of the directed weights in both directions.
inline UndirectedGraph project_undirected(const MultiTokenNetwork& net) {
  UndirectedGraph g;
  g.n = net.node_count();
  g.adj.resize(g.n);
  g.self_loop.assign(g.n, 0.0);
  std::unordered_map<std::uint64_t, std::size_t> seen;  // min<<32|max -> adj pos in min's list
  for (const MtnEdge& e : net.edges()) {
    std::uint32_t a = std::min(e.src, e.dst);
    std::uint32_t b = std::max(e.src, e.dst);
    std::uint64_t key = (static_cast<std::uint64_t>(a) << 32) | b;
    auto it = seen.find(key);
    if (it == seen.end()) {
      seen.emplace(key, g.adj[a].size());
      g.adj[a].emplace_back(b, static_cast<double>(e.weight));
      g.adj[b].emplace_back(a, static_cast<double>(e.weight));
    } else {
      g.adj[a][it->second].second += static_cast<double>(e.weight);
      for (auto& [to, w] : g.adj[b])
        if (to == a) {
          w += static_cast<double>(e.weight);
          break;
        }
    }
  }
  return g;
}

// Newman-Girvan weighted modularity with a resolution parameter:
// Q = sum_c [ in_c/(2m) - resolution * (tot_c/(2m))^2 ].
inline double modularity(const UndirectedGraph& g, std::span<const std::uint32_t> partition,
                         double resolution = 1.0) {
  if (partition.size() != g.n) throw Error("partition does not cover all nodes");
  double two_m = g.two_m();
  if (two_m <= 0.0) throw Error("modularity of a graph with zero total weight");
  std::uint32_t num_comms = 0;
  for (std::uint32_t c : partition) num_comms = std::max(num_comms, c + 1);
  std::vector<double> internal(num_comms, 0.0), total(num_comms, 0.0);
  for (std::uint32_t i = 0; i < g.n; ++i) {
    total[partition[i]] += g.degree(i);
    internal[partition[i]] += 2.0 * g.self_loop[i];
    for (const auto& [j, w] : g.adj[i])
      if (partition[j] == partition[i]) internal[partition[i]] += w;
  }
  double q = 0.0;
  for (std::uint32_t c = 0; c < num_comms; ++c) {
    double frac = total[c] / two_m;
    q += internal[c] / two_m - resolution * frac * frac;
  }
  return q;
}

struct Partition {
  std::vector<std::uint32_t> community;  // dense ids from 0, descending size
  double modularity = 0.0;
  double resolution = 1.0;
  std::uint64_t seed = 0;
  std::size_t community_count = 0;
};

namespace detail {

// std::shuffle is implementation-defined; this one is pinned.
inline void deterministic_shuffle(std::vector<std::uint32_t>& order, std::mt19937_64& rng) {
  for (std::size_t i = order.size(); i > 1; --i)
    std::swap(order[i - 1], order[rng() % i]);
}

struct LouvainLevel {
  std::vector<std::uint32_t> assignment;  // node -> dense community id
  bool moved_any = false;
};

inline LouvainLevel one_level(const UndirectedGraph& g, double resolution,
                              std::mt19937_64& rng) {
  const double two_m = g.two_m();
  std::vector<std::uint32_t> community(g.n);
  std::iota(community.begin(), community.end(), 0);
  std::vector<double> tot(g.n);
  for (std::uint32_t i = 0; i < g.n; ++i) tot[i] = g.degree(i);

  std::vector<std::uint32_t> order(g.n);
  std::iota(order.begin(), order.end(), 0);

  LouvainLevel level;
  bool improved = true;
  // pass cap guards against floating-point ping-pong between equal-gain moves
  for (int pass = 0; improved && pass < 1000; ++pass) {
    improved = false;
    deterministic_shuffle(order, rng);
    for (std::uint32_t node : order) {
      std::uint32_t old_com = community[node];
      double k = g.degree(node);

      // neighbor community weights, first-seen order for deterministic argmax
      std::unordered_map<std::uint32_t, std::size_t> pos;
      std::vector<std::pair<std::uint32_t, double>> neigh;
      for (const auto& [j, w] : g.adj[node]) {
        if (j == node) continue;
        std::uint32_t c = community[j];
        auto [it, inserted] = pos.emplace(c, neigh.size());
        if (inserted) neigh.emplace_back(c, w);
        else neigh[it->second].second += w;
      }

      tot[old_com] -= k;
      double w_old = 0.0;
      for (const auto& [c, w] : neigh)
        if (c == old_com) w_old = w;
      double base = w_old - resolution * tot[old_com] * k / two_m;

      std::uint32_t best_com = old_com;
      double best_gain = 0.0;
      for (const auto& [c, w] : neigh) {
        if (c == old_com) continue;
        double gain = (w - resolution * tot[c] * k / two_m) - base;
        if (gain > best_gain) {
          best_gain = gain;
          best_com = c;
        }
      }
      tot[best_com] += k;
      community[node] = best_com;
      if (best_com != old_com) {
        improved = true;
        level.moved_any = true;
      }
    }
  }
  // densify community ids in order of first node occurrence
  std::unordered_map<std::uint32_t, std::uint32_t> remap;
  level.assignment.resize(g.n);
  for (std::uint32_t i = 0; i < g.n; ++i) {
    auto [it, inserted] = remap.emplace(community[i], static_cast<std::uint32_t>(remap.size()));
    level.assignment[i] = it->second;
  }
  return level;
}

inline UndirectedGraph aggregate_graph(const UndirectedGraph& g,
                                       std::span<const std::uint32_t> assignment) {
  std::uint32_t num_comms = 0;
  for (std::uint32_t c : assignment) num_comms = std::max(num_comms, c + 1);
  UndirectedGraph out;
  out.n = num_comms;
  out.adj.resize(num_comms);
  out.self_loop.assign(num_comms, 0.0);
  std::unordered_map<std::uint64_t, std::size_t> seen;
  for (std::uint32_t i = 0; i < g.n; ++i) {
    out.self_loop[assignment[i]] += g.self_loop[i];
    for (const auto& [j, w] : g.adj[i]) {
      if (j < i) continue;  // visit each undirected edge once
      std::uint32_t a = assignment[i], b = assignment[j];
      if (a == b) {
        out.self_loop[a] += w;
        continue;
      }
      std::uint32_t lo = std::min(a, b), hi = std::max(a, b);
      std::uint64_t key = (static_cast<std::uint64_t>(lo) << 32) | hi;
      auto it = seen.find(key);
      if (it == seen.end()) {
        seen.emplace(key, out.adj[lo].size());
        out.adj[lo].emplace_back(hi, w);
        out.adj[hi].emplace_back(lo, w);
      } else {
        out.adj[lo][it->second].second += w;
        for (auto& [to, ww] : out.adj[hi])
          if (to == lo) {
            ww += w;
            break;
          }
      }
    }
  }
  return out;
}

}  // namespace detail

// Two-phase Louvain; deterministic for a fixed seed. Community ids are
// relabeled by descending community size.
inline Partition louvain(const UndirectedGraph& graph, double resolution = 1.0,
                         std::uint64_t seed = 42) {
  if (graph.n == 0) throw Error("louvain of empty graph");
  if (graph.two_m() <= 0.0) throw Error("louvain of a graph with zero total weight");

  std::mt19937_64 rng(seed);
  std::vector<std::uint32_t> node_to_comm(graph.n);
  std::iota(node_to_comm.begin(), node_to_comm.end(), 0);

  UndirectedGraph current = graph;
  while (true) {
    detail::LouvainLevel level = detail::one_level(current, resolution, rng);
    for (auto& c : node_to_comm) c = level.assignment[c];
    if (!level.moved_any) break;
    current = detail::aggregate_graph(current, level.assignment);
  }

  // relabel by descending size, ties by smallest member node index
  std::uint32_t num_comms = 0;
  for (std::uint32_t c : node_to_comm) num_comms = std::max(num_comms, c + 1);
  std::vector<std::size_t> size(num_comms, 0);
  std::vector<std::uint32_t> first_node(num_comms, 0xffffffff);
  for (std::uint32_t i = 0; i < node_to_comm.size(); ++i) {
    ++size[node_to_comm[i]];
    first_node[node_to_comm[i]] = std::min(first_node[node_to_comm[i]], i);
  }
  std::vector<std::uint32_t> by_size(num_comms);
  std::iota(by_size.begin(), by_size.end(), 0);
  std::sort(by_size.begin(), by_size.end(), [&](std::uint32_t a, std::uint32_t b) {
    if (size[a] != size[b]) return size[a] > size[b];
    return first_node[a] < first_node[b];
  });
  std::vector<std::uint32_t> relabel(num_comms);
  for (std::uint32_t rank = 0; rank < num_comms; ++rank) relabel[by_size[rank]] = rank;
  for (auto& c : node_to_comm) c = relabel[c];

  Partition out;
  out.community = std::move(node_to_comm);
  out.resolution = resolution;
  out.seed = seed;
  out.community_count = num_comms;
  out.modularity = modularity(graph, out.community, resolution);
  return out;
}

}  // namespace mtnet
