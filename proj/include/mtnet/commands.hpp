#pragma once

// Command implementations behind the CLI: build, analyze, temporal, export.
// Every command writes its reports plus the serialized config it ran with
// into the output directory, and is deterministic given that config.

#include <algorithm>
#include <array>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <limits>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <unordered_set>
#include <vector>

#include <json.hpp>

#include "mtnet/backbone.hpp"
#include "mtnet/centrality.hpp"
#include "mtnet/community.hpp"
#include "mtnet/config.hpp"
#include "mtnet/csv.hpp"
#include "mtnet/graph_export.hpp"
#include "mtnet/ingest.hpp"
#include "mtnet/network.hpp"
#include "mtnet/rbo.hpp"
#include "mtnet/scc.hpp"
#include "mtnet/temporal.hpp"
#include "mtnet/time.hpp"

namespace mtnet::commands {

// exit codes shared with the CLI front end
inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitInput = 2;
inline constexpr int kExitNotConverged = 3;

struct Inputs {
  std::vector<TransferRecord> records;  // filtered per config
  EntityMap entities;
};

namespace detail {

inline std::ifstream open_input(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open input file: " + path);
  return in;
}

inline std::ofstream open_output(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot open output file: " + path.string());
  return out;
}

template <typename Fn>
inline auto with_file_context(const std::string& path, Fn&& fn) {
  try {
    return fn();
  } catch (const Error& e) {
    throw Error(path + ": " + e.what());
  }
}

inline std::size_t levenshtein(std::string_view a, std::string_view b) {
  std::vector<std::size_t> prev(b.size() + 1), cur(b.size() + 1);
  for (std::size_t j = 0; j <= b.size(); ++j) prev[j] = j;
  for (std::size_t i = 1; i <= a.size(); ++i) {
    cur[0] = i;
    for (std::size_t j = 1; j <= b.size(); ++j) {
      std::size_t sub = prev[j - 1] + (a[i - 1] == b[j - 1] ? 0 : 1);
      cur[j] = std::min({prev[j] + 1, cur[j - 1] + 1, sub});
    }
    std::swap(prev, cur);
  }
  return prev[b.size()];
}

}  // namespace detail

inline Inputs load_inputs(const RunConfig& cfg) {
  validate_config(cfg);
  if (cfg.transfers.empty()) throw Error("no transfers file configured");

  Inputs inputs;
  {
    auto in = detail::open_input(cfg.transfers);
    TransferFormat fmt =
        cfg.transfers_format == "jsonl" ? TransferFormat::jsonl : TransferFormat::csv;
    inputs.records = detail::with_file_context(cfg.transfers,
                                               [&] { return parse_transfers(in, fmt); });
  }

  std::vector<AddressLabel> labels;
  if (!cfg.labels.empty()) {
    auto in = detail::open_input(cfg.labels);
    labels = detail::with_file_context(cfg.labels, [&] { return parse_labels_csv(in); });
  }
  std::set<std::string> ego_tags;
  if (!cfg.ego_tags.empty()) {
    auto in = detail::open_input(cfg.ego_tags);
    for (auto& tag : read_line_list(in)) ego_tags.insert(std::move(tag));
  }
  inputs.entities = build_entity_map(
      labels, ego_tags,
      cfg.group_entities ? EntityGrouping::entity : EntityGrouping::address);

  std::optional<std::unordered_set<std::string>> allowlist;
  if (!cfg.allowlist.empty()) {
    auto in = detail::open_input(cfg.allowlist);
    allowlist.emplace();
    for (auto& token : read_line_list(in)) allowlist->insert(to_lower(token));
  }
  std::optional<TimeWindow> window;
  if (!cfg.window_start.empty() || !cfg.window_end.empty()) {
    TimeWindow w{std::numeric_limits<time::UnixSeconds>::min(),
                 std::numeric_limits<time::UnixSeconds>::max()};
    if (!cfg.window_start.empty()) w.start = time::parse_timestamp(cfg.window_start);
    if (!cfg.window_end.empty()) w.end = time::parse_timestamp(cfg.window_end);
    window = w;
  }
  if (allowlist || window)
    inputs.records = filter_transfers(inputs.records, allowlist, window);
  return inputs;
}

namespace detail {

inline std::filesystem::path prepare_out_dir(const RunConfig& cfg) {
  std::filesystem::path dir(cfg.out_dir);
  std::filesystem::create_directories(dir);
  auto os = open_output(dir / "config_used.toml");
  os << serialize_config(cfg);
  return dir;
}

inline nlohmann::ordered_json network_stats_json(const MultiTokenNetwork& net) {
  NetworkCounts counts = count_network(net);
  nlohmann::ordered_json j;
  j["nodes"] = counts.nodes;
  j["users"] = counts.users;
  j["tokens"] = counts.tokens;
  j["links"] = counts.links;
  j["density_global"] = counts.nodes >= 2 ? density(net, DensityMode::global) : 0.0;
  bool has_pair = false;
  for (const auto& [token, members] : net.token_layers())
    if (members.size() >= 2) has_pair = true;
  j["density_layered"] = has_pair ? density(net, DensityMode::layered) : 0.0;
  j["retained_records"] = net.retained_records();
  return j;
}

inline void write_json(const std::filesystem::path& path, const nlohmann::ordered_json& j) {
  auto os = open_output(path);
  os << j.dump(2) << '\n';
}

inline std::string node_key(const MtnNode& n) { return n.entity + "|" + n.token; }

struct CentralityBundle {
  ScoreVector pr, cr;
  OrderedScores pr_users, cr_users, pr_tokens, cr_tokens;
};

inline CentralityBundle compute_centrality(const MultiTokenNetwork& net,
                                           const RunConfig& cfg) {
  PowerIterOptions opts{cfg.damping, cfg.tol, cfg.max_iter};
  CentralityBundle b;
  b.pr = pagerank(net, opts);
  b.cr = cheirank(net, opts);
  b.pr_users = aggregate(net, b.pr, Axis::user);
  b.cr_users = aggregate(net, b.cr, Axis::user);
  b.pr_tokens = aggregate(net, b.pr, Axis::token);
  b.cr_tokens = aggregate(net, b.cr, Axis::token);
  return b;
}

inline void write_score_report(const std::filesystem::path& path, const OrderedScores& pr,
                               const OrderedScores& cr, const PctbResult& balance) {
  auto os = open_output(path);
  csv::write_row(os, std::array<std::string_view, 4>{"key", "pagerank", "cheirank", "pctb"});
  for (std::size_t i = 0; i < pr.keys.size(); ++i) {
    const double* cr_v = cr.find(pr.keys[i]);
    const double* b_v = balance.scores.find(pr.keys[i]);
    csv::write_row(os, std::array<std::string, 4>{pr.keys[i], fmt_double(pr.values[i]),
                                                  cr_v ? fmt_double(*cr_v) : "",
                                                  b_v ? fmt_double(*b_v) : ""});
  }
}

}  // namespace detail

// Network dump (node/edge CSVs) plus structural stats.
inline int cmd_build(const RunConfig& cfg) {
  Inputs inputs = load_inputs(cfg);
  auto dir = detail::prepare_out_dir(cfg);
  MultiTokenNetwork net = build_mtn(inputs.records, inputs.entities);
  {
    auto nodes_os = detail::open_output(dir / "nodes.csv");
    auto edges_os = detail::open_output(dir / "edges.csv");
    write_network_csv(net, nodes_os, edges_os);
  }
  detail::write_json(dir / "stats.json", detail::network_stats_json(net));
  return kExitOk;
}

// Score reports at node/user/token granularity, top-10 tables with RBO,
// backbone, SCC and community reports, as requested.
inline int cmd_analyze(const RunConfig& cfg, const std::set<std::string>& which,
                       bool allow_unconverged = false) {
  for (const auto& w : which)
    if (w != "centrality" && w != "pctb" && w != "backbone" && w != "scc" &&
        w != "communities")
      throw Error("unknown analysis '" + w +
                  "' (expected centrality|pctb|backbone|scc|communities)");

  Inputs inputs = load_inputs(cfg);
  auto dir = detail::prepare_out_dir(cfg);
  MultiTokenNetwork net = build_mtn(inputs.records, inputs.entities);

  bool want_scores = which.count("centrality") || which.count("pctb");
  bool unconverged = false;

  if (want_scores) {
    if (net.empty()) {
      auto os = detail::open_output(dir / "scores_nodes.csv");
      csv::write_row(os, std::array<std::string_view, 4>{"key", "pagerank", "cheirank", "pctb"});
      auto os_u = detail::open_output(dir / "scores_users.csv");
      csv::write_row(os_u, std::array<std::string_view, 4>{"key", "pagerank", "cheirank", "pctb"});
      auto os_t = detail::open_output(dir / "scores_tokens.csv");
      csv::write_row(os_t, std::array<std::string_view, 4>{"key", "pagerank", "cheirank", "pctb"});
    } else {
      detail::CentralityBundle b = detail::compute_centrality(net, cfg);
      unconverged = !b.pr.converged || !b.cr.converged;

      PctbResult user_balance = pctb(b.pr_users, b.cr_users);
      PctbResult token_balance = pctb(b.pr_tokens, b.cr_tokens);
      std::vector<double> node_balance = pctb_ut(net, b.pr, b.cr, b.pr_users, b.cr_users);

      {
        auto os = detail::open_output(dir / "scores_nodes.csv");
        csv::write_row(os,
                       std::array<std::string_view, 4>{"key", "pagerank", "cheirank", "pctb"});
        for (std::uint32_t i = 0; i < net.node_count(); ++i)
          csv::write_row(os, std::array<std::string, 4>{
                                 detail::node_key(net.node(i)), fmt_double(b.pr.p[i]),
                                 fmt_double(b.cr.p[i]), fmt_double(node_balance[i])});
      }
      detail::write_score_report(dir / "scores_users.csv", b.pr_users, b.cr_users,
                                 user_balance);
      detail::write_score_report(dir / "scores_tokens.csv", b.pr_tokens, b.cr_tokens,
                                 token_balance);

      if (which.count("centrality")) {
        auto top_rows = detail::open_output(dir / "top10.csv");
        csv::write_row(top_rows, std::array<std::string_view, 5>{"axis", "metric", "rank",
                                                                 "key", "score"});
        auto emit = [&](std::string_view axis, std::string_view metric,
                        const OrderedScores& scores) {
          std::vector<std::string> keys;
          std::size_t rank = 1;
          for (const auto& [key, score] : top_k(scores, 10)) {
            csv::write_row(top_rows,
                           std::array<std::string, 5>{std::string(axis), std::string(metric),
                                                      std::to_string(rank), key,
                                                      fmt_double(score)});
            keys.push_back(key);
            ++rank;
          }
          return keys;
        };
        auto pr_u = emit("user", "pagerank", b.pr_users);
        auto cr_u = emit("user", "cheirank", b.cr_users);
        auto pr_t = emit("token", "pagerank", b.pr_tokens);
        auto cr_t = emit("token", "cheirank", b.cr_tokens);
        nlohmann::ordered_json j;
        j["p"] = cfg.rbo_p;
        j["users"] = rbo(pr_u, cr_u, cfg.rbo_p);
        j["tokens"] = rbo(pr_t, cr_t, cfg.rbo_p);
        detail::write_json(dir / "rbo.json", j);
      }

      nlohmann::ordered_json meta;
      meta["damping"] = cfg.damping;
      meta["tol"] = cfg.tol;
      meta["max_iter"] = cfg.max_iter;
      meta["pagerank"] = {{"iterations", b.pr.iterations},
                          {"residual", b.pr.residual},
                          {"converged", b.pr.converged}};
      meta["cheirank"] = {{"iterations", b.cr.iterations},
                          {"residual", b.cr.residual},
                          {"converged", b.cr.converged}};
      detail::write_json(dir / "centrality_meta.json", meta);
    }
  }

  if (which.count("backbone")) {
    if (net.empty()) {
      auto nodes_os = detail::open_output(dir / "backbone_nodes.csv");
      auto edges_os = detail::open_output(dir / "backbone_edges.csv");
      csv::write_row(nodes_os, std::array<std::string_view, 3>{"entity", "token", "is_ego"});
      csv::write_row(edges_os, std::array<std::string_view, 5>{"src_entity", "dst_entity",
                                                               "token", "weight", "kept_by"});
      nlohmann::ordered_json j;
      j["alpha"] = cfg.alpha;
      j["nodes"] = 0;
      detail::write_json(dir / "backbone_stats.json", j);
    } else {
      BackboneResult backbone = extract_backbone(net, cfg.alpha);
      {
        auto nodes_os = detail::open_output(dir / "backbone_nodes.csv");
        csv::write_row(nodes_os, std::array<std::string_view, 3>{"entity", "token", "is_ego"});
        for (const auto& n : backbone.network.nodes())
          csv::write_row(nodes_os, std::array<std::string, 3>{n.entity, n.token,
                                                              n.is_ego ? "true" : "false"});
        auto edges_os = detail::open_output(dir / "backbone_edges.csv");
        csv::write_row(edges_os, std::array<std::string_view, 5>{"src_entity", "dst_entity",
                                                                 "token", "weight", "kept_by"});
        for (std::uint32_t e = 0; e < backbone.network.edge_count(); ++e) {
          const MtnEdge& edge = backbone.network.edges()[e];
          csv::write_row(edges_os,
                         std::array<std::string, 5>{
                             backbone.network.node(edge.src).entity,
                             backbone.network.node(edge.dst).entity,
                             backbone.network.node(edge.src).token,
                             std::to_string(edge.weight),
                             std::string(kept_by_name(backbone.edges[e].kept_by))});
        }
      }
      BackboneStats stats = backbone_stats(backbone);
      nlohmann::ordered_json j;
      j["alpha"] = cfg.alpha;
      j["nodes"] = stats.counts.nodes;
      j["users"] = stats.counts.users;
      j["tokens"] = stats.counts.tokens;
      j["links"] = stats.counts.links;
      j["density_global"] = stats.density_global;
      j["density_layered"] = stats.density_layered;
      j["fraction_nodes"] = stats.fraction_nodes;
      j["fraction_users"] = stats.fraction_users;
      j["fraction_tokens"] = stats.fraction_tokens;
      j["fraction_links"] = stats.fraction_links;
      detail::write_json(dir / "backbone_stats.json", j);
    }
  }

  if (which.count("scc")) {
    std::optional<std::unordered_set<std::string>> group;
    if (!cfg.group.empty()) group.emplace(cfg.group.begin(), cfg.group.end());
    SccSummary summary = scc_decomposition(net, group);
    compute_scc_diameters(net, summary);
    auto os = detail::open_output(dir / "scc.csv");
    csv::write_row(os, std::array<std::string_view, 6>{"component_id", "size", "users",
                                                       "token", "diameter", "has_ego_group"});
    for (std::size_t i = 0; i < summary.components.size(); ++i) {
      const auto& comp = summary.components[i];
      csv::write_row(os, std::array<std::string, 6>{
                             std::to_string(i), std::to_string(comp.nodes.size()),
                             std::to_string(comp.user_count), comp.token,
                             std::to_string(comp.diameter.value_or(0)),
                             comp.has_ego_group ? "true" : "false"});
    }
    DiameterDistribution dist = diameter_distribution(summary);
    nlohmann::ordered_json j;
    j["components"] = summary.components.size();
    j["nonsingleton_components"] = dist.nonsingleton_components;
    j["ego_group_fraction"] = dist.ego_group_fraction;
    nlohmann::ordered_json hist = nlohmann::ordered_json::object();
    for (const auto& [diameter, count] : dist.histogram)
      hist[std::to_string(diameter)] = count;
    j["diameter_histogram"] = hist;
    detail::write_json(dir / "scc_summary.json", j);
  }

  if (which.count("communities")) {
    auto os = detail::open_output(dir / "communities.csv");
    csv::write_row(os, std::array<std::string_view, 3>{"entity", "token", "community"});
    nlohmann::ordered_json j;
    if (net.empty()) {
      j["communities"] = 0;
    } else {
      UndirectedGraph projection = project_undirected(net);
      Partition partition = louvain(projection, cfg.louvain_resolution, cfg.seed);
      for (std::uint32_t i = 0; i < net.node_count(); ++i)
        csv::write_row(os, std::array<std::string, 3>{net.node(i).entity, net.node(i).token,
                                                      std::to_string(partition.community[i])});
      j["communities"] = partition.community_count;
      j["modularity"] = partition.modularity;
    }
    j["resolution"] = cfg.louvain_resolution;
    j["seed"] = cfg.seed;
    detail::write_json(dir / "communities_meta.json", j);
  }

  if (unconverged && !allow_unconverged) return kExitNotConverged;
  return kExitOk;
}

namespace detail {

inline std::unordered_set<std::string> resolve_group(const std::vector<std::string>& names,
                                                     const EntityMap& entities,
                                                     const MultiTokenNetwork& net) {
  std::set<std::string> known(entities.names().begin(), entities.names().end());
  for (const auto& n : net.nodes()) known.insert(n.entity);

  std::unordered_set<std::string> group;
  for (const auto& name : names) {
    if (known.count(name)) {
      group.insert(name);
      continue;
    }
    std::vector<std::pair<std::size_t, std::string>> scored;
    for (const auto& candidate : known)
      scored.emplace_back(levenshtein(name, candidate), candidate);
    std::sort(scored.begin(), scored.end());
    std::string suggestions;
    for (std::size_t i = 0; i < scored.size() && i < 3; ++i) {
      if (!suggestions.empty()) suggestions += ", ";
      suggestions += "'" + scored[i].second + "'";
    }
    throw Error("unknown group entity '" + name + "'" +
                (suggestions.empty() ? "" : ("; nearest matches: " + suggestions)));
  }
  return group;
}

struct SeriesWriter {
  std::ofstream os;
  std::map<std::pair<std::string, std::string>, std::map<time::UnixSeconds, double>> daily;
  bool collect_daily = false;

  void row(const Snapshot& snap, std::string_view metric, std::string_view key, double value,
           bool integral) {
    csv::write_row(os, std::array<std::string, 5>{
                           time::format_iso(snap.start), time::format_iso(snap.end),
                           std::string(metric), std::string(key),
                           integral ? std::to_string(static_cast<std::int64_t>(value))
                                    : fmt_double(value)});
    if (collect_daily)
      daily[{std::string(metric), std::string(key)}][snap.start] = value;
  }
};

}  // namespace detail

// Size, novelty, ego-activity, group centrality and per-token balance series
// at the requested resolution; daily runs also get monthly averages.
inline int cmd_temporal(const RunConfig& cfg) {
  Inputs inputs = load_inputs(cfg);
  auto dir = detail::prepare_out_dir(cfg);
  time::Resolution resolution = time::parse_resolution(cfg.resolution);

  MultiTokenNetwork full = build_mtn(inputs.records, inputs.entities);
  std::unordered_set<std::string> group;
  if (!cfg.group.empty()) group = detail::resolve_group(cfg.group, inputs.entities, full);

  SnapshotSeries series = snapshot_series(inputs.records, resolution, inputs.entities);

  detail::SeriesWriter writer;
  writer.os = detail::open_output(dir / ("temporal_" + cfg.resolution + ".csv"));
  writer.collect_daily = resolution == time::Resolution::day;
  csv::write_row(writer.os, std::array<std::string_view, 5>{"window_start", "window_end",
                                                            "metric", "key", "value"});

  for (const auto& snap : series.windows) {
    writer.row(snap, "nodes", "", static_cast<double>(snap.network.node_count()), true);
    writer.row(snap, "edges", "", static_cast<double>(snap.network.edge_count()), true);
  }
  if (!series.windows.empty()) {
    std::vector<NoveltyPoint> novelty = novelty_ratios(series);
    for (std::size_t w = 0; w < series.windows.size(); ++w) {
      writer.row(series.windows[w], "new_entity_fraction", "",
                 novelty[w].new_entity_fraction, false);
      writer.row(series.windows[w], "new_token_fraction", "", novelty[w].new_token_fraction,
                 false);
    }
  }
  if (!group.empty()) {
    std::vector<EgoActivityPoint> activity = ego_activity(series, group);
    for (std::size_t w = 0; w < series.windows.size(); ++w) {
      writer.row(series.windows[w], "ego_in_edges", "",
                 static_cast<double>(activity[w].in_edges), true);
      writer.row(series.windows[w], "ego_out_edges", "",
                 static_cast<double>(activity[w].out_edges), true);
      writer.row(series.windows[w], "ego_transactions", "",
                 static_cast<double>(activity[w].transactions), true);
    }
    PowerIterOptions opts{cfg.damping, cfg.tol, cfg.max_iter};
    for (const auto& pt : group_centrality_series(series, group, opts)) {
      writer.row(series.windows[pt.window], "group_pagerank", "", pt.pagerank, false);
      writer.row(series.windows[pt.window], "group_cheirank", "", pt.cheirank, false);
      writer.row(series.windows[pt.window], "group_pctb", "", pt.balance, false);
    }
    for (const auto& pt : token_pctb_series(series, group, std::nullopt, opts))
      writer.row(series.windows[pt.window], "token_pctb", pt.token, pt.balance, false);
  }

  if (writer.collect_daily) {
    auto monthly_os = detail::open_output(dir / "temporal_monthly_avg.csv");
    csv::write_row(monthly_os, std::array<std::string_view, 5>{"month_start", "month_end",
                                                               "metric", "key", "value"});
    for (const auto& [metric_key, days] : writer.daily) {
      for (const auto& [month, mean] : monthly_average(days)) {
        csv::write_row(monthly_os,
                       std::array<std::string, 5>{
                           time::format_iso(month),
                           time::format_iso(time::next_window(month, time::Resolution::month)),
                           metric_key.first, metric_key.second, fmt_double(mean)});
      }
    }
  }
  return kExitOk;
}

// Attribute-annotated graph export (GEXF or DOT) of the full network or its
// backbone; attributes come from the full-network analyses.
inline int cmd_export(const RunConfig& cfg, const std::string& format, bool use_backbone,
                      bool allow_unconverged = false) {
  if (format != "gexf" && format != "dot")
    throw Error("unknown export format '" + format + "' (expected gexf or dot)");
  Inputs inputs = load_inputs(cfg);
  auto dir = detail::prepare_out_dir(cfg);
  MultiTokenNetwork net = build_mtn(inputs.records, inputs.entities);

  bool unconverged = false;
  ExportAttributes attrs;
  const MultiTokenNetwork* target = &net;
  MultiTokenNetwork backbone_net;
  std::vector<KeptBy> kept_by;

  if (!net.empty()) {
    PowerIterOptions opts{cfg.damping, cfg.tol, cfg.max_iter};
    ScoreVector pr = pagerank(net, opts);
    unconverged = !pr.converged;
    UndirectedGraph projection = project_undirected(net);
    Partition partition = louvain(projection, cfg.louvain_resolution, cfg.seed);

    if (use_backbone) {
      BackboneResult backbone = extract_backbone(net, cfg.alpha);
      backbone_net = std::move(backbone.network);
      target = &backbone_net;
      attrs.pagerank.resize(backbone_net.node_count());
      attrs.community.resize(backbone_net.node_count());
      for (std::uint32_t i = 0; i < backbone_net.node_count(); ++i) {
        auto orig = net.find_node(backbone_net.node(i).entity, backbone_net.node(i).token);
        if (!orig) throw Error("backbone node missing from source network");
        attrs.pagerank[i] = pr.p[*orig];
        attrs.community[i] = partition.community[*orig];
      }
      attrs.kept_by.reserve(backbone.edges.size());
      for (const auto& rec : backbone.edges) attrs.kept_by.push_back(rec.kept_by);
    } else {
      attrs.pagerank = pr.p;
      attrs.community = partition.community;
    }
  }

  std::string stem = use_backbone ? "backbone" : "network";
  auto os = detail::open_output(dir / (stem + "." + format));
  if (format == "gexf")
    write_gexf(os, *target, attrs);
  else
    write_dot(os, *target, attrs);

  if (unconverged && !allow_unconverged) return kExitNotConverged;
  return kExitOk;
}

}  // namespace mtnet::commands
