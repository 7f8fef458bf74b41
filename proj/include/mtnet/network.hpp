#pragma once

// The duplicated-node multi-token network: nodes are (entity, token) pairs,
// directed edges carry transaction counts and never cross token layers.
// Every edge has at least one ego endpoint; intra-entity transfers are
// dropped at construction.

#include <algorithm>
#include <cstdint>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <tuple>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "mtnet/csv.hpp"
#include "mtnet/error.hpp"
#include "mtnet/ingest.hpp"

namespace mtnet {

struct MtnNode {
  std::string entity;
  std::string token;
  bool is_ego = false;
};

struct MtnEdge {
  std::uint32_t src = 0;
  std::uint32_t dst = 0;
  std::uint64_t weight = 0;
};

class NetworkBuilder;

class MultiTokenNetwork {
 public:
  std::size_t node_count() const { return nodes_.size(); }
  std::size_t edge_count() const { return edges_.size(); }
  bool empty() const { return nodes_.empty(); }

  const MtnNode& node(std::uint32_t i) const { return nodes_[i]; }
  const std::vector<MtnNode>& nodes() const { return nodes_; }
  const std::vector<MtnEdge>& edges() const { return edges_; }

  // Edge indices incident to a node, in edge-insertion order.
  const std::vector<std::uint32_t>& out_edges(std::uint32_t node) const { return out_[node]; }
  const std::vector<std::uint32_t>& in_edges(std::uint32_t node) const { return in_[node]; }

  std::uint64_t out_strength(std::uint32_t node) const { return out_strength_[node]; }
  std::uint64_t in_strength(std::uint32_t node) const { return in_strength_[node]; }

  std::optional<std::uint32_t> find_node(const std::string& entity,
                                         const std::string& token) const {
    auto it = index_.find(node_key(entity, token));
    if (it == index_.end()) return std::nullopt;
    return it->second;
  }

  // token -> node indices, ordered by token for deterministic reports
  const std::map<std::string, std::vector<std::uint32_t>>& token_layers() const {
    return layers_;
  }

  // number of transfer records aggregated into the edge weights
  std::uint64_t retained_records() const { return retained_; }

  std::size_t distinct_entities() const {
    std::unordered_set<std::string_view> s;
    for (const auto& n : nodes_) s.insert(n.entity);
    return s.size();
  }

 private:
  friend class NetworkBuilder;
  friend MultiTokenNetwork transpose(const MultiTokenNetwork&);

  static std::string node_key(std::string_view entity, std::string_view token) {
    std::string k;
    k.reserve(entity.size() + token.size() + 1);
    k.append(entity);
    k.push_back('\x1f');
    k.append(token);
    return k;
  }

  void finalize_adjacency() {
    out_.assign(nodes_.size(), {});
    in_.assign(nodes_.size(), {});
    out_strength_.assign(nodes_.size(), 0);
    in_strength_.assign(nodes_.size(), 0);
    layers_.clear();
    for (std::uint32_t i = 0; i < nodes_.size(); ++i)
      layers_[nodes_[i].token].push_back(i);
    for (std::uint32_t e = 0; e < edges_.size(); ++e) {
      const MtnEdge& edge = edges_[e];
      out_[edge.src].push_back(e);
      in_[edge.dst].push_back(e);
      out_strength_[edge.src] += edge.weight;
      in_strength_[edge.dst] += edge.weight;
    }
  }

  std::vector<MtnNode> nodes_;
  std::vector<MtnEdge> edges_;
  std::unordered_map<std::string, std::uint32_t> index_;
  std::vector<std::vector<std::uint32_t>> out_, in_;
  std::vector<std::uint64_t> out_strength_, in_strength_;
  std::map<std::string, std::vector<std::uint32_t>> layers_;
  std::uint64_t retained_ = 0;
};

// Incremental construction with first-seen node/edge indices, then an
// immutable network after build().
class NetworkBuilder {
 public:
  std::uint32_t add_node(std::string entity, std::string token, bool is_ego) {
    std::string key = MultiTokenNetwork::node_key(entity, token);
    auto it = net_.index_.find(key);
    if (it != net_.index_.end()) {
      if (net_.nodes_[it->second].is_ego != is_ego)
        throw Error("conflicting ego flag for node (" + entity + ", " + token + ")");
      return it->second;
    }
    auto id = static_cast<std::uint32_t>(net_.nodes_.size());
    net_.nodes_.push_back({std::move(entity), std::move(token), is_ego});
    net_.index_.emplace(std::move(key), id);
    return id;
  }

  void add_edge(std::uint32_t src, std::uint32_t dst, std::uint64_t weight) {
    if (src == dst) throw Error("self-loop edges are not representable");
    if (net_.nodes_[src].token != net_.nodes_[dst].token)
      throw Error("edge crosses token layers");
    if (!net_.nodes_[src].is_ego && !net_.nodes_[dst].is_ego)
      throw Error("alter-alter edges are not representable");
    if (weight == 0) throw Error("edge weight must be positive");
    std::uint64_t key = (static_cast<std::uint64_t>(src) << 32) | dst;
    auto it = edge_index_.find(key);
    if (it != edge_index_.end()) {
      net_.edges_[it->second].weight += weight;
    } else {
      edge_index_.emplace(key, static_cast<std::uint32_t>(net_.edges_.size()));
      net_.edges_.push_back({src, dst, weight});
    }
  }

  void set_retained_records(std::uint64_t n) { net_.retained_ = n; }

  MultiTokenNetwork build() {
    net_.finalize_adjacency();
    return std::move(net_);
  }

 private:
  MultiTokenNetwork net_;
  std::unordered_map<std::uint64_t, std::uint32_t> edge_index_;
};

// Records where neither endpoint entity is ego, or where sender and receiver
// collapse to the same entity, are dropped. Edge weights count the surviving
// records per (source entity, target entity, token).
inline MultiTokenNetwork build_mtn(std::span<const TransferRecord> records,
                                   const EntityMap& entities) {
  NetworkBuilder builder;
  std::uint64_t retained = 0;
  for (const auto& r : records) {
    EntityMap::Resolved from = entities.resolve(r.from_addr);
    EntityMap::Resolved to = entities.resolve(r.to_addr);
    if (from.name == to.name) continue;  // intra-entity transfer
    if (!from.ego && !to.ego) continue;  // alter-alter
    std::uint32_t src = builder.add_node(std::move(from.name), r.token, from.ego);
    std::uint32_t dst = builder.add_node(std::move(to.name), r.token, to.ego);
    builder.add_edge(src, dst, 1);
    ++retained;
  }
  builder.set_retained_records(retained);
  return builder.build();
}

// Same nodes, every edge reversed with weight preserved. Applying it twice
// reproduces the original, including edge order.
inline MultiTokenNetwork transpose(const MultiTokenNetwork& net) {
  MultiTokenNetwork out;
  out.nodes_ = net.nodes_;
  out.index_ = net.index_;
  out.retained_ = net.retained_;
  out.edges_.reserve(net.edges_.size());
  for (const MtnEdge& e : net.edges_) out.edges_.push_back({e.dst, e.src, e.weight});
  out.finalize_adjacency();
  return out;
}

enum class DensityMode { global, layered };

// Directed density over ordered pairs; layered mode restricts the pair count
// to token layers.
inline double density(const MultiTokenNetwork& net, DensityMode mode) {
  if (mode == DensityMode::global) {
    double n = static_cast<double>(net.node_count());
    if (n < 2) throw Error("global density needs at least 2 nodes");
    return static_cast<double>(net.edge_count()) / (n * (n - 1));
  }
  double denom = 0;
  for (const auto& [token, members] : net.token_layers()) {
    double n = static_cast<double>(members.size());
    denom += n * (n - 1);
  }
  if (denom == 0) throw Error("layered density needs a token layer with at least 2 nodes");
  return static_cast<double>(net.edge_count()) / denom;
}

enum class Direction { in, out };

// For each observed degree d (distinct neighbors), the fraction of nodes with
// degree >= d, ascending in d.
inline std::vector<std::pair<std::uint64_t, double>> degree_ccdf(const MultiTokenNetwork& net,
                                                                 Direction dir) {
  if (net.empty()) throw Error("degree_ccdf of empty network");
  std::map<std::uint64_t, std::size_t> counts;
  for (std::uint32_t i = 0; i < net.node_count(); ++i) {
    std::size_t deg =
        dir == Direction::out ? net.out_edges(i).size() : net.in_edges(i).size();
    ++counts[deg];
  }
  std::vector<std::pair<std::uint64_t, double>> out;
  out.reserve(counts.size());
  std::size_t at_least = net.node_count();
  double n = static_cast<double>(net.node_count());
  for (const auto& [deg, cnt] : counts) {
    out.emplace_back(deg, static_cast<double>(at_least) / n);
    at_least -= cnt;
  }
  return out;
}

// Union of networks over the same entity/token universe; weights add.
// Because construction drops records independently of windowing, merging a
// partition of the records equals building from all of them.
inline MultiTokenNetwork merge_networks(std::span<const MultiTokenNetwork> nets) {
  NetworkBuilder builder;
  std::uint64_t retained = 0;
  for (const auto& net : nets) {
    for (const auto& n : net.nodes()) builder.add_node(n.entity, n.token, n.is_ego);
    for (const auto& e : net.edges()) {
      std::uint32_t src = builder.add_node(net.node(e.src).entity, net.node(e.src).token,
                                           net.node(e.src).is_ego);
      std::uint32_t dst = builder.add_node(net.node(e.dst).entity, net.node(e.dst).token,
                                           net.node(e.dst).is_ego);
      builder.add_edge(src, dst, e.weight);
    }
    retained += net.retained_records();
  }
  builder.set_retained_records(retained);
  return builder.build();
}

// Label-level equality, independent of node index assignment.
inline bool structurally_equal(const MultiTokenNetwork& a, const MultiTokenNetwork& b) {
  if (a.node_count() != b.node_count() || a.edge_count() != b.edge_count()) return false;
  using NodeKey = std::tuple<std::string, std::string, bool>;
  using EdgeKey = std::tuple<std::string, std::string, std::string, std::uint64_t>;
  auto node_keys = [](const MultiTokenNetwork& n) {
    std::vector<NodeKey> keys;
    keys.reserve(n.node_count());
    for (const auto& node : n.nodes()) keys.emplace_back(node.entity, node.token, node.is_ego);
    std::sort(keys.begin(), keys.end());
    return keys;
  };
  auto edge_keys = [](const MultiTokenNetwork& n) {
    std::vector<EdgeKey> keys;
    keys.reserve(n.edge_count());
    for (const auto& e : n.edges())
      keys.emplace_back(n.node(e.src).entity, n.node(e.dst).entity, n.node(e.src).token,
                        e.weight);
    std::sort(keys.begin(), keys.end());
    return keys;
  };
  return node_keys(a) == node_keys(b) && edge_keys(a) == edge_keys(b);
}

// Node list `entity,token,is_ego` and edge list `src_entity,dst_entity,token,weight`;
// round-trips through read_network_csv with node indices preserved.
inline void write_network_csv(const MultiTokenNetwork& net, std::ostream& nodes_os,
                              std::ostream& edges_os) {
  csv::write_row(nodes_os, std::array<std::string_view, 3>{"entity", "token", "is_ego"});
  for (const auto& n : net.nodes())
    csv::write_row(nodes_os, std::array<std::string, 3>{n.entity, n.token,
                                                        n.is_ego ? "true" : "false"});
  csv::write_row(edges_os, std::array<std::string_view, 4>{"src_entity", "dst_entity", "token",
                                                           "weight"});
  for (const auto& e : net.edges())
    csv::write_row(edges_os,
                   std::array<std::string, 4>{net.node(e.src).entity, net.node(e.dst).entity,
                                              net.node(e.src).token, std::to_string(e.weight)});
}

inline MultiTokenNetwork read_network_csv(std::istream& nodes_is, std::istream& edges_is) {
  NetworkBuilder builder;
  csv::Reader nodes_reader(nodes_is);
  std::vector<std::string> row;
  if (!nodes_reader.next(row) || row.size() != 3 || row[0] != "entity")
    throw Error("bad node list header (expected entity,token,is_ego)");
  std::map<std::pair<std::string, std::string>, std::uint32_t> index;
  while (nodes_reader.next(row)) {
    if (row.size() != 3) throw ParseError(nodes_reader.record_line(), "", "expected 3 fields");
    bool ego = row[2] == "true";
    if (!ego && row[2] != "false")
      throw ParseError(nodes_reader.record_line(), "is_ego", "expected true or false");
    index[{row[0], row[1]}] = builder.add_node(row[0], row[1], ego);
  }
  csv::Reader edges_reader(edges_is);
  if (!edges_reader.next(row) || row.size() != 4 || row[0] != "src_entity")
    throw Error("bad edge list header (expected src_entity,dst_entity,token,weight)");
  std::uint64_t total_weight = 0;
  while (edges_reader.next(row)) {
    if (row.size() != 4) throw ParseError(edges_reader.record_line(), "", "expected 4 fields");
    std::uint64_t weight = 0;
    if (!parse_u64(row[3], weight))
      throw ParseError(edges_reader.record_line(), "weight", "not a positive integer");
    auto src = index.find({row[0], row[2]});
    auto dst = index.find({row[1], row[2]});
    if (src == index.end() || dst == index.end())
      throw ParseError(edges_reader.record_line(), "",
                       "edge references a node missing from the node list");
    builder.add_edge(src->second, dst->second, weight);
    total_weight += weight;
  }
  builder.set_retained_records(total_weight);
  return builder.build();
}

}  // namespace mtnet
