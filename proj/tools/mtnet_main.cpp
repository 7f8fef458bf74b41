// mtnet: build and analyze multi-token transfer networks from token
// transfer records.
//
// Subcommands: build, analyze, temporal, export. All runs are driven by a
// flat key = value config file, overridable by flags, and write their
// effective config next to the outputs.

#include <fstream>
#include <iostream>
#include <set>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "mtnet/commands.hpp"
#include "mtnet/config.hpp"

namespace {

struct CliOverrides {
  std::string config_path;
  std::string out_dir;
  std::string group_entities;  // "on" | "off" | ""
  std::optional<std::uint64_t> seed;
  std::string transfers, transfers_format, labels, ego_tags, allowlist;
  std::optional<double> damping, tol, alpha, rbo_p, louvain_resolution;
  std::optional<int> max_iter;
  std::vector<std::string> group;
  std::string resolution;
  std::string window_start, window_end;
};

mtnet::RunConfig effective_config(const CliOverrides& ov) {
  mtnet::RunConfig cfg;
  if (!ov.config_path.empty()) {
    std::ifstream in(ov.config_path, std::ios::binary);
    if (!in) throw mtnet::Error("cannot open config file: " + ov.config_path);
    try {
      cfg = mtnet::parse_config(in);
    } catch (const mtnet::Error& e) {
      throw mtnet::Error(ov.config_path + ": " + e.what());
    }
  }
  if (!ov.out_dir.empty()) cfg.out_dir = ov.out_dir;
  if (ov.group_entities == "on") cfg.group_entities = true;
  if (ov.group_entities == "off") cfg.group_entities = false;
  if (ov.seed) cfg.seed = *ov.seed;
  if (!ov.transfers.empty()) cfg.transfers = ov.transfers;
  if (!ov.transfers_format.empty()) cfg.transfers_format = ov.transfers_format;
  if (!ov.labels.empty()) cfg.labels = ov.labels;
  if (!ov.ego_tags.empty()) cfg.ego_tags = ov.ego_tags;
  if (!ov.allowlist.empty()) cfg.allowlist = ov.allowlist;
  if (ov.damping) cfg.damping = *ov.damping;
  if (ov.tol) cfg.tol = *ov.tol;
  if (ov.alpha) cfg.alpha = *ov.alpha;
  if (ov.rbo_p) cfg.rbo_p = *ov.rbo_p;
  if (ov.louvain_resolution) cfg.louvain_resolution = *ov.louvain_resolution;
  if (ov.max_iter) cfg.max_iter = *ov.max_iter;
  if (!ov.group.empty()) cfg.group = ov.group;
  if (!ov.resolution.empty()) cfg.resolution = ov.resolution;
  if (!ov.window_start.empty()) cfg.window_start = ov.window_start;
  if (!ov.window_end.empty()) cfg.window_end = ov.window_end;
  return cfg;
}

void add_common_options(CLI::App* cmd, CliOverrides& ov) {
  cmd->add_option("--config", ov.config_path, "flat key = value config file");
  cmd->add_option("--out-dir", ov.out_dir, "output directory");
  cmd->add_option("--group-entities", ov.group_entities, "on|off: entity vs address nodes")
      ->check(CLI::IsMember({"on", "off"}));
  cmd->add_option("--seed", ov.seed, "seed for community detection");
  cmd->add_option("--transfers", ov.transfers, "transfer records file");
  cmd->add_option("--transfers-format", ov.transfers_format, "csv|jsonl")
      ->check(CLI::IsMember({"csv", "jsonl"}));
  cmd->add_option("--labels", ov.labels, "address labels CSV");
  cmd->add_option("--ego-tags", ov.ego_tags, "ego entity prefixes, one per line");
  cmd->add_option("--allowlist", ov.allowlist, "token allowlist, one per line");
  cmd->add_option("--damping", ov.damping, "PageRank damping factor");
  cmd->add_option("--tol", ov.tol, "power-iteration L1 tolerance");
  cmd->add_option("--max-iter", ov.max_iter, "power-iteration cap");
  cmd->add_option("--alpha", ov.alpha, "backbone significance threshold");
  cmd->add_option("--rbo-p", ov.rbo_p, "RBO persistence parameter");
  cmd->add_option("--louvain-resolution", ov.louvain_resolution, "modularity resolution");
  cmd->add_option("--window-start", ov.window_start, "keep transfers at/after this instant");
  cmd->add_option("--window-end", ov.window_end, "keep transfers before this instant");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"multi-token transfer network analysis"};
  app.require_subcommand(1);

  CliOverrides ov;
  std::vector<std::string> which;
  bool allow_unconverged = false;
  std::string export_format = "gexf";
  bool export_backbone = false;

  CLI::App* build = app.add_subcommand("build", "build the network and dump nodes/edges/stats");
  add_common_options(build, ov);

  CLI::App* analyze = app.add_subcommand("analyze", "centrality, PCTB, backbone, SCC, communities");
  add_common_options(analyze, ov);
  analyze->add_option("--which", which,
                      "subset of centrality,pctb,backbone,scc,communities (default: all)");
  analyze->add_flag("--allow-unconverged", allow_unconverged,
                    "exit 0 even when power iteration hit max_iter");

  CLI::App* temporal = app.add_subcommand("temporal", "snapshot time series");
  add_common_options(temporal, ov);
  temporal->add_option("--resolution", ov.resolution, "day|month|year")
      ->check(CLI::IsMember({"day", "month", "year"}));
  temporal->add_option("--group", ov.group, "entity group for activity/centrality series");

  CLI::App* exp = app.add_subcommand("export", "attribute-annotated graph file");
  add_common_options(exp, ov);
  exp->add_option("--format", export_format, "gexf|dot")
      ->check(CLI::IsMember({"gexf", "dot"}));
  exp->add_flag("--backbone", export_backbone, "export the backbone instead of the full network");
  exp->add_flag("--allow-unconverged", allow_unconverged,
                "exit 0 even when power iteration hit max_iter");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : mtnet::commands::kExitUsage;
  }

  try {
    mtnet::RunConfig cfg = effective_config(ov);
    if (build->parsed()) return mtnet::commands::cmd_build(cfg);
    if (analyze->parsed()) {
      std::set<std::string> requested(which.begin(), which.end());
      if (requested.empty())
        requested = {"centrality", "pctb", "backbone", "scc", "communities"};
      return mtnet::commands::cmd_analyze(cfg, requested, allow_unconverged);
    }
    if (temporal->parsed()) return mtnet::commands::cmd_temporal(cfg);
    if (exp->parsed())
      return mtnet::commands::cmd_export(cfg, export_format, export_backbone,
                                         allow_unconverged);
  } catch (const mtnet::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return mtnet::commands::kExitInput;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return mtnet::commands::kExitInput;
  }
  return mtnet::commands::kExitUsage;
}
