#pragma once

// Directional multiscale (disparity-filter) backbone. An edge's weight share
// is tested against a uniform null over its endpoint's distinct neighbors;
// the edge stays when either endpoint finds it significant at level alpha.

#include <cmath>
#include <cstdint>
#include <string>
#include <unordered_set>
#include <vector>

#include "mtnet/error.hpp"
#include "mtnet/network.hpp"

namespace mtnet {

struct EdgeSignificance {
  double s_out;  // weight / total out-weight of the source
  double s_in;   // weight / total in-weight of the target
};

// Strengths are per token layer by construction: a node's edges all carry
// its own token.
inline EdgeSignificance edge_significance(const MultiTokenNetwork& net,
                                          std::uint32_t edge_index) {
  if (edge_index >= net.edge_count()) throw Error("edge index out of range");
  const MtnEdge& e = net.edges()[edge_index];
  return {static_cast<double>(e.weight) / static_cast<double>(net.out_strength(e.src)),
          static_cast<double>(e.weight) / static_cast<double>(net.in_strength(e.dst))};
}

enum class KeptBy : std::uint8_t { source_test, target_test, both };

inline std::string_view kept_by_name(KeptBy k) {
  switch (k) {
    case KeptBy::source_test: return "source_test";
    case KeptBy::target_test: return "target_test";
    case KeptBy::both: return "both";
  }
  return "?";
}

struct BackboneEdgeRecord {
  std::uint32_t original_edge;  // index into the input network's edge list
  double s_out;
  double s_in;
  KeptBy kept_by;
};

struct NetworkCounts {
  std::size_t nodes = 0;
  std::size_t users = 0;
  std::size_t tokens = 0;
  std::size_t links = 0;
};

inline NetworkCounts count_network(const MultiTokenNetwork& net) {
  return {net.node_count(), net.distinct_entities(), net.token_layers().size(),
          net.edge_count()};
}

struct BackboneResult {
  MultiTokenNetwork network;  // retained subnetwork, isolated nodes removed
  double alpha = 0.0;
  std::vector<BackboneEdgeRecord> edges;  // aligned with network.edges()
  NetworkCounts original;
};

// Keep an edge iff (1 - s_out)^(k_out - 1) < alpha or the mirrored incoming
// test passes; degrees count distinct neighbors, and a degree-1 endpoint has
// exponent 0, so it can never pass its own test for alpha < 1.
inline BackboneResult extract_backbone(const MultiTokenNetwork& net, double alpha) {
  if (!(alpha > 0.0 && alpha <= 1.0)) throw Error("alpha must lie in (0, 1]");
  if (net.empty()) throw Error("backbone of empty network");

  BackboneResult result;
  result.alpha = alpha;
  result.original = count_network(net);

  NetworkBuilder builder;
  std::uint64_t retained_weight = 0;
  for (std::uint32_t idx = 0; idx < net.edge_count(); ++idx) {
    const MtnEdge& e = net.edges()[idx];
    EdgeSignificance sig = edge_significance(net, idx);
    double k_out = static_cast<double>(net.out_edges(e.src).size());
    double k_in = static_cast<double>(net.in_edges(e.dst).size());
    bool src_pass = std::pow(1.0 - sig.s_out, k_out - 1.0) < alpha;
    bool dst_pass = std::pow(1.0 - sig.s_in, k_in - 1.0) < alpha;
    if (!src_pass && !dst_pass) continue;

    const MtnNode& a = net.node(e.src);
    const MtnNode& b = net.node(e.dst);
    std::uint32_t src = builder.add_node(a.entity, a.token, a.is_ego);
    std::uint32_t dst = builder.add_node(b.entity, b.token, b.is_ego);
    builder.add_edge(src, dst, e.weight);
    retained_weight += e.weight;
    KeptBy kept = src_pass && dst_pass ? KeptBy::both
                  : src_pass           ? KeptBy::source_test
                                       : KeptBy::target_test;
    result.edges.push_back({idx, sig.s_out, sig.s_in, kept});
  }
  builder.set_retained_records(retained_weight);
  result.network = builder.build();
  return result;
}

struct BackboneStats {
  NetworkCounts counts;
  double density_global = 0.0;   // 0 when degenerate
  double density_layered = 0.0;
  double fraction_nodes = 0.0;
  double fraction_users = 0.0;
  double fraction_tokens = 0.0;
  double fraction_links = 0.0;
};

inline BackboneStats backbone_stats(const BackboneResult& result) {
  BackboneStats stats;
  stats.counts = count_network(result.network);
  if (stats.counts.nodes >= 2) stats.density_global = density(result.network, DensityMode::global);
  bool has_layer_pair = false;
  for (const auto& [token, members] : result.network.token_layers())
    if (members.size() >= 2) has_layer_pair = true;
  if (has_layer_pair) stats.density_layered = density(result.network, DensityMode::layered);
  auto frac = [](std::size_t part, std::size_t whole) {
    return whole == 0 ? 0.0 : static_cast<double>(part) / static_cast<double>(whole);
  };
  stats.fraction_nodes = frac(stats.counts.nodes, result.original.nodes);
  stats.fraction_users = frac(stats.counts.users, result.original.users);
  stats.fraction_tokens = frac(stats.counts.tokens, result.original.tokens);
  stats.fraction_links = frac(stats.counts.links, result.original.links);
  return stats;
}

}  // namespace mtnet
