#pragma once

// Snapshot series over UTC calendar windows. Each window's network is built
// independently from that window's transfers only; windows with no transfers
// are omitted. Novelty, ego activity, and per-window centrality/balance
// series follow, plus daily-to-monthly averaging.

#include <algorithm>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <unordered_set>
#include <vector>

#include "mtnet/centrality.hpp"
#include "mtnet/error.hpp"
#include "mtnet/ingest.hpp"
#include "mtnet/network.hpp"
#include "mtnet/time.hpp"

namespace mtnet {

struct Snapshot {
  time::UnixSeconds start = 0;
  time::UnixSeconds end = 0;  // half-open [start, end)
  MultiTokenNetwork network;
  std::vector<std::string> new_entities;  // first appearance across the series
  std::vector<std::string> new_tokens;
};

struct SnapshotSeries {
  time::Resolution resolution = time::Resolution::month;
  std::vector<Snapshot> windows;  // ascending, disjoint
};

inline SnapshotSeries snapshot_series(std::span<const TransferRecord> records,
                                      time::Resolution resolution,
                                      const EntityMap& entities) {
  std::vector<TransferRecord> sorted(records.begin(), records.end());
  std::stable_sort(sorted.begin(), sorted.end(),
                   [](const TransferRecord& a, const TransferRecord& b) {
                     return a.timestamp < b.timestamp;
                   });

  SnapshotSeries series;
  series.resolution = resolution;
  std::map<time::UnixSeconds, std::vector<TransferRecord>> buckets;
  for (auto& r : sorted) buckets[time::floor_to(r.timestamp, resolution)].push_back(std::move(r));

  std::unordered_set<std::string> seen_entities, seen_tokens;
  for (auto& [start, bucket] : buckets) {
    Snapshot snap;
    snap.start = start;
    snap.end = time::next_window(start, resolution);
    snap.network = build_mtn(bucket, entities);
    for (const auto& node : snap.network.nodes()) {
      if (seen_entities.insert(node.entity).second) snap.new_entities.push_back(node.entity);
      if (seen_tokens.insert(node.token).second) snap.new_tokens.push_back(node.token);
    }
    series.windows.push_back(std::move(snap));
  }
  return series;
}

struct NoveltyPoint {
  double new_entity_fraction = 0.0;  // new / present in the window
  double new_token_fraction = 0.0;
};

// New relative to the union of all previous windows; the first window is all
// new by definition.
inline std::vector<NoveltyPoint> novelty_ratios(const SnapshotSeries& series) {
  if (series.windows.empty()) throw Error("novelty_ratios of empty series");
  std::vector<NoveltyPoint> out;
  out.reserve(series.windows.size());
  for (const auto& snap : series.windows) {
    std::unordered_set<std::string_view> entities, tokens;
    for (const auto& node : snap.network.nodes()) {
      entities.insert(node.entity);
      tokens.insert(node.token);
    }
    NoveltyPoint pt;
    if (!entities.empty())
      pt.new_entity_fraction =
          static_cast<double>(snap.new_entities.size()) / static_cast<double>(entities.size());
    if (!tokens.empty())
      pt.new_token_fraction =
          static_cast<double>(snap.new_tokens.size()) / static_cast<double>(tokens.size());
    out.push_back(pt);
  }
  return out;
}

struct EgoActivityPoint {
  std::uint64_t in_edges = 0;       // edges into a group entity
  std::uint64_t out_edges = 0;      // edges out of a group entity
  std::uint64_t transactions = 0;   // summed weights of edges touching the group
};

inline std::vector<EgoActivityPoint> ego_activity(const SnapshotSeries& series,
                                                  const std::unordered_set<std::string>& group) {
  if (group.empty()) throw Error("ego_activity requires a non-empty group");
  std::vector<EgoActivityPoint> out;
  out.reserve(series.windows.size());
  for (const auto& snap : series.windows) {
    EgoActivityPoint pt;
    const auto& net = snap.network;
    for (const MtnEdge& e : net.edges()) {
      bool src_in = group.count(net.node(e.src).entity) > 0;
      bool dst_in = group.count(net.node(e.dst).entity) > 0;
      if (src_in) ++pt.out_edges;
      if (dst_in) ++pt.in_edges;
      if (src_in || dst_in) pt.transactions += e.weight;
    }
    out.push_back(pt);
  }
  return out;
}

struct GroupCentralityPoint {
  std::size_t window = 0;  // index into series.windows
  double pagerank = 0.0;
  double cheirank = 0.0;
  double balance = 0.0;  // (cheirank - pagerank) / (cheirank + pagerank)
};

namespace detail {

inline double group_mass(const MultiTokenNetwork& net, const ScoreVector& scores,
                         const std::unordered_set<std::string>& group,
                         const std::optional<std::string>& token = std::nullopt) {
  KahanSum sum;
  for (std::uint32_t i = 0; i < net.node_count(); ++i) {
    if (group.count(net.node(i).entity) == 0) continue;
    if (token && net.node(i).token != *token) continue;
    sum.add(scores.p[i]);
  }
  return sum.value();
}

}  // namespace detail

// Per-window PageRank/CheiRank mass of the group and its trade balance;
// windows without any group node yield no data point.
inline std::vector<GroupCentralityPoint> group_centrality_series(
    const SnapshotSeries& series, const std::unordered_set<std::string>& group,
    PowerIterOptions opts = {}) {
  if (group.empty()) throw Error("group_centrality_series requires a non-empty group");
  std::vector<GroupCentralityPoint> out;
  for (std::size_t w = 0; w < series.windows.size(); ++w) {
    const auto& net = series.windows[w].network;
    if (net.empty()) continue;
    bool present = false;
    for (const auto& node : net.nodes())
      if (group.count(node.entity)) {
        present = true;
        break;
      }
    if (!present) continue;
    ScoreVector pr = pagerank(net, opts);
    ScoreVector cr = cheirank(net, opts);
    GroupCentralityPoint pt;
    pt.window = w;
    pt.pagerank = detail::group_mass(net, pr, group);
    pt.cheirank = detail::group_mass(net, cr, group);
    pt.balance = (pt.cheirank - pt.pagerank) / (pt.cheirank + pt.pagerank);
    out.push_back(pt);
  }
  return out;
}

struct TokenPctbPoint {
  std::size_t window = 0;
  std::string token;
  double balance = 0.0;
};

// Per-window, per-token group balance with the group-level denominator, so
// the per-token contributions of a window sum to the group balance. The
// token set defaults to the union of the top-10 PageRank and top-10 CheiRank
// tokens of the merged whole-span network.
inline std::vector<TokenPctbPoint> token_pctb_series(
    const SnapshotSeries& series, const std::unordered_set<std::string>& group,
    std::optional<std::set<std::string>> tokens = std::nullopt, PowerIterOptions opts = {}) {
  if (group.empty()) throw Error("token_pctb_series requires a non-empty group");

  if (!tokens) {
    std::vector<MultiTokenNetwork> nets;
    nets.reserve(series.windows.size());
    for (const auto& snap : series.windows) nets.push_back(snap.network);
    if (nets.empty()) return {};
    MultiTokenNetwork merged = merge_networks(nets);
    if (merged.empty()) return {};
    ScoreVector pr = pagerank(merged, opts);
    ScoreVector cr = cheirank(merged, opts);
    tokens.emplace();
    for (const auto& [token, score] : top_k(aggregate(merged, pr, Axis::token), 10))
      tokens->insert(token);
    for (const auto& [token, score] : top_k(aggregate(merged, cr, Axis::token), 10))
      tokens->insert(token);
  }

  std::vector<TokenPctbPoint> out;
  for (std::size_t w = 0; w < series.windows.size(); ++w) {
    const auto& net = series.windows[w].network;
    if (net.empty()) continue;
    std::set<std::string> group_tokens;
    for (const auto& node : net.nodes())
      if (group.count(node.entity) && tokens->count(node.token)) group_tokens.insert(node.token);
    if (group_tokens.empty()) continue;

    ScoreVector pr = pagerank(net, opts);
    ScoreVector cr = cheirank(net, opts);
    double p_group = detail::group_mass(net, pr, group);
    double c_group = detail::group_mass(net, cr, group);
    double denom = p_group + c_group;
    if (denom <= 0.0) continue;
    for (const auto& token : group_tokens) {
      TokenPctbPoint pt;
      pt.window = w;
      pt.token = token;
      pt.balance = (detail::group_mass(net, cr, group, token) -
                    detail::group_mass(net, pr, group, token)) /
                   denom;
      out.push_back(pt);
    }
  }
  return out;
}

// Arithmetic mean over the days with data in each calendar month.
inline std::map<time::UnixSeconds, double> monthly_average(
    const std::map<time::UnixSeconds, double>& daily) {
  std::map<time::UnixSeconds, KahanSum> sums;
  std::map<time::UnixSeconds, std::size_t> counts;
  for (const auto& [day, value] : daily) {
    time::UnixSeconds month = time::floor_to(day, time::Resolution::month);
    sums[month].add(value);
    ++counts[month];
  }
  std::map<time::UnixSeconds, double> out;
  for (const auto& [month, sum] : sums)
    out[month] = sum.value() / static_cast<double>(counts[month]);
  return out;
}

}  // namespace mtnet
