#pragma once

// Run configuration: a flat key = value document (TOML-style scalars, '#'
// comments), overridable by command-line flags. The serialized form is
// written next to every output set for provenance.

#include <istream>
#include <map>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "mtnet/error.hpp"
#include "mtnet/strings.hpp"
#include "mtnet/time.hpp"

namespace mtnet {

struct RunConfig {
  // inputs
  std::string transfers;             // required by every command
  std::string transfers_format = "csv";  // csv | jsonl
  std::string labels;                // optional
  std::string ego_tags;              // optional
  std::string allowlist;             // optional: no token filtering when empty
  std::string window_start;          // optional ISO/unix bounds on ingestion
  std::string window_end;

  // analysis parameters
  bool group_entities = true;
  double damping = 0.85;
  double tol = 1e-10;
  int max_iter = 200;
  double alpha = 0.001;
  double rbo_p = 0.9;
  std::string resolution = "month";  // day | month | year
  double louvain_resolution = 1.0;
  std::uint64_t seed = 42;
  std::vector<std::string> group;    // designated entity group for temporal/scc views

  std::string out_dir = "out";
};

namespace detail {

inline std::string unquote(std::string_view v, std::size_t line) {
  if (v.size() >= 2 && v.front() == '"' && v.back() == '"') {
    std::string out;
    for (std::size_t i = 1; i + 1 < v.size(); ++i) {
      if (v[i] == '\\' && i + 2 < v.size()) ++i;
      out.push_back(v[i]);
    }
    return out;
  }
  if (!v.empty() && (v.front() == '"' || v.back() == '"'))
    throw ParseError(line, "", "unbalanced quotes");
  return std::string(v);
}

inline std::string quote(std::string_view v) {
  std::string out = "\"";
  for (char c : v) {
    if (c == '"' || c == '\\') out.push_back('\\');
    out.push_back(c);
  }
  out.push_back('"');
  return out;
}

}  // namespace detail

inline RunConfig parse_config(std::istream& in) {
  RunConfig cfg;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::string_view body = trim(line);
    if (body.empty() || body.front() == '#') continue;
    auto eq = body.find('=');
    if (eq == std::string_view::npos)
      throw ParseError(line_no, "", "expected key = value");
    std::string key(trim(body.substr(0, eq)));
    std::string_view raw = trim(body.substr(eq + 1));
    // strip trailing comment on unquoted values
    if (raw.empty() || raw.front() != '"') {
      auto hash = raw.find('#');
      if (hash != std::string_view::npos) raw = trim(raw.substr(0, hash));
    }
    std::string value = detail::unquote(raw, line_no);

    auto as_bool = [&](std::string_view v) {
      if (v == "true" || v == "on") return true;
      if (v == "false" || v == "off") return false;
      throw ParseError(line_no, key, "expected true/false/on/off");
    };
    auto as_f64 = [&](std::string_view v) {
      double d = 0;
      if (!parse_f64(v, d)) throw ParseError(line_no, key, "expected a number");
      return d;
    };

    if (key == "transfers") cfg.transfers = value;
    else if (key == "transfers_format") cfg.transfers_format = value;
    else if (key == "labels") cfg.labels = value;
    else if (key == "ego_tags") cfg.ego_tags = value;
    else if (key == "allowlist") cfg.allowlist = value;
    else if (key == "window_start") cfg.window_start = value;
    else if (key == "window_end") cfg.window_end = value;
    else if (key == "group_entities") cfg.group_entities = as_bool(value);
    else if (key == "damping") cfg.damping = as_f64(value);
    else if (key == "tol") cfg.tol = as_f64(value);
    else if (key == "max_iter") cfg.max_iter = static_cast<int>(as_f64(value));
    else if (key == "alpha") cfg.alpha = as_f64(value);
    else if (key == "rbo_p") cfg.rbo_p = as_f64(value);
    else if (key == "resolution") cfg.resolution = value;
    else if (key == "louvain_resolution") cfg.louvain_resolution = as_f64(value);
    else if (key == "seed") {
      std::uint64_t s = 0;
      if (!parse_u64(value, s)) throw ParseError(line_no, key, "expected an integer");
      cfg.seed = s;
    } else if (key == "group") {
      cfg.group.push_back(value);
    } else if (key == "out_dir") {
      cfg.out_dir = value;
    } else {
      throw ParseError(line_no, key, "unknown configuration key");
    }
  }
  return cfg;
}

inline void validate_config(const RunConfig& cfg) {
  if (!(cfg.damping > 0.0 && cfg.damping < 1.0)) throw Error("damping must lie in (0, 1)");
  if (!(cfg.tol > 0.0)) throw Error("tol must be positive");
  if (cfg.max_iter < 1) throw Error("max_iter must be at least 1");
  if (!(cfg.alpha > 0.0 && cfg.alpha <= 1.0)) throw Error("alpha must lie in (0, 1]");
  if (!(cfg.rbo_p > 0.0 && cfg.rbo_p < 1.0)) throw Error("rbo_p must lie in (0, 1)");
  if (!(cfg.louvain_resolution > 0.0)) throw Error("louvain_resolution must be positive");
  time::parse_resolution(cfg.resolution);
  if (cfg.transfers_format != "csv" && cfg.transfers_format != "jsonl")
    throw Error("transfers_format must be csv or jsonl");
  if (!cfg.window_start.empty()) time::parse_timestamp(cfg.window_start);
  if (!cfg.window_end.empty()) time::parse_timestamp(cfg.window_end);
}

inline std::string serialize_config(const RunConfig& cfg) {
  std::ostringstream os;
  os << "transfers = " << detail::quote(cfg.transfers) << '\n'
     << "transfers_format = " << detail::quote(cfg.transfers_format) << '\n'
     << "labels = " << detail::quote(cfg.labels) << '\n'
     << "ego_tags = " << detail::quote(cfg.ego_tags) << '\n'
     << "allowlist = " << detail::quote(cfg.allowlist) << '\n'
     << "window_start = " << detail::quote(cfg.window_start) << '\n'
     << "window_end = " << detail::quote(cfg.window_end) << '\n'
     << "group_entities = " << (cfg.group_entities ? "true" : "false") << '\n'
     << "damping = " << fmt_double(cfg.damping) << '\n'
     << "tol = " << fmt_double(cfg.tol) << '\n'
     << "max_iter = " << cfg.max_iter << '\n'
     << "alpha = " << fmt_double(cfg.alpha) << '\n'
     << "rbo_p = " << fmt_double(cfg.rbo_p) << '\n'
     << "resolution = " << detail::quote(cfg.resolution) << '\n'
     << "louvain_resolution = " << fmt_double(cfg.louvain_resolution) << '\n'
     << "seed = " << cfg.seed << '\n';
  for (const auto& g : cfg.group) os << "group = " << detail::quote(g) << '\n';
  os << "out_dir = " << detail::quote(cfg.out_dir) << '\n';
  return os.str();
}

}  // namespace mtnet
