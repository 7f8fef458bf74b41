#pragma once

// Shared fixture builders: deterministic synthetic transfer sets, random
// networks built through the real ingestion path, and the structural
// invariant checks applied to every constructed network in the suite.

#include <cstdint>
#include <random>
#include <set>
#include <string>
#include <unordered_set>
#include <vector>

#include "mtnet/ingest.hpp"
#include "mtnet/network.hpp"

namespace fixtures {

struct RandomNetSpec {
  std::size_t ego_entities = 6;
  std::size_t alter_entities = 40;
  std::size_t tokens = 4;
  std::size_t records = 300;
  std::uint64_t seed = 1;
  bool ensure_dangling = true;
};

struct RandomNet {
  std::vector<mtnet::TransferRecord> records;
  mtnet::EntityMap entities;
  mtnet::MultiTokenNetwork net;
};

inline std::string ego_name(std::size_t i) { return "0xe" + std::to_string(i); }
inline std::string alter_name(std::size_t i) { return "0xa" + std::to_string(i); }
inline std::string token_name(std::size_t i) { return "tok" + std::to_string(i); }

// Random ego-centered network generated through build_mtn, so every fixture
// honors the construction rules by the same path production data takes.
inline RandomNet random_net(const RandomNetSpec& spec) {
  std::mt19937_64 rng(spec.seed);
  RandomNet out;

  std::set<std::string> ego_tags;
  for (std::size_t i = 0; i < spec.ego_entities; ++i) ego_tags.insert(ego_name(i));
  out.entities = mtnet::build_entity_map({}, ego_tags);

  auto pick_entity = [&](bool ego) {
    if (ego) return ego_name(rng() % spec.ego_entities);
    return alter_name(rng() % spec.alter_entities);
  };

  for (std::size_t r = 0; r < spec.records; ++r) {
    mtnet::TransferRecord rec;
    rec.block_number = r;
    rec.timestamp = static_cast<std::int64_t>(1500000000 + r * 60);
    rec.tx_hash = "0x" + std::to_string(r);
    rec.token = token_name(rng() % spec.tokens);
    bool from_ego = rng() % 2 == 0;
    bool to_ego = !from_ego || rng() % 3 == 0;
    rec.from_addr = pick_entity(from_ego);
    rec.to_addr = pick_entity(to_ego);
    rec.value = "1";
    out.records.push_back(std::move(rec));
  }
  if (spec.ensure_dangling) {
    // receive-only alters become dangling (out-degree 0) nodes
    for (std::size_t t = 0; t < spec.tokens; ++t) {
      mtnet::TransferRecord rec;
      rec.block_number = spec.records + t;
      rec.timestamp = static_cast<std::int64_t>(1500000000 + (spec.records + t) * 60);
      rec.tx_hash = "0xsink" + std::to_string(t);
      rec.token = token_name(t);
      rec.from_addr = ego_name(t % spec.ego_entities);
      rec.to_addr = "0xsinkonly" + std::to_string(t);
      rec.value = "1";
      out.records.push_back(std::move(rec));
    }
  }
  out.net = mtnet::build_mtn(out.records, out.entities);
  return out;
}

// Hand-built network from labeled edges; all listed entities that appear in
// `egos` get the ego flag.
struct EdgeSpec {
  std::string src;
  std::string dst;
  std::string token;
  std::uint64_t weight = 1;
};

inline mtnet::MultiTokenNetwork net_from_edges(const std::vector<EdgeSpec>& edges,
                                               const std::set<std::string>& egos) {
  mtnet::NetworkBuilder builder;
  std::uint64_t total = 0;
  for (const auto& e : edges) {
    auto src = builder.add_node(e.src, e.token, egos.count(e.src) > 0);
    auto dst = builder.add_node(e.dst, e.token, egos.count(e.dst) > 0);
    builder.add_edge(src, dst, e.weight);
    total += e.weight;
  }
  builder.set_retained_records(total);
  return builder.build();
}

// Structural invariants checked on every constructed network: token-layer
// closure, the ego rule, no self-loops, and weight conservation.
inline void check_structure(const mtnet::MultiTokenNetwork& net) {
  std::uint64_t total_weight = 0;
  for (const auto& e : net.edges()) {
    if (e.src == e.dst) throw mtnet::Error("structure: self-loop edge");
    if (net.node(e.src).token != net.node(e.dst).token)
      throw mtnet::Error("structure: edge crosses token layers");
    if (!net.node(e.src).is_ego && !net.node(e.dst).is_ego)
      throw mtnet::Error("structure: alter-alter edge");
    if (e.weight == 0) throw mtnet::Error("structure: zero-weight edge");
    total_weight += e.weight;
  }
  if (total_weight != net.retained_records())
    throw mtnet::Error("structure: edge weights do not sum to retained record count");
  std::size_t layer_total = 0;
  for (const auto& [token, members] : net.token_layers()) layer_total += members.size();
  if (layer_total != net.node_count())
    throw mtnet::Error("structure: token layers do not partition the node set");
}

}  // namespace fixtures
