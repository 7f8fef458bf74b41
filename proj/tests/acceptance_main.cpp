// Acceptance suite: one pass/fail line per criterion, non-zero exit when any
// criterion fails. Tolerances are pinned in the checks themselves.

#include <sys/wait.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <unordered_set>
#include <vector>

#include "fixtures.hpp"
#include "mtnet/backbone.hpp"
#include "mtnet/centrality.hpp"
#include "mtnet/community.hpp"
#include "mtnet/rbo.hpp"
#include "mtnet/scc.hpp"
#include "mtnet/temporal.hpp"
#include "oracles.hpp"

namespace fs = std::filesystem;
using namespace mtnet;

namespace {

int g_failures = 0;
std::uint64_t g_networks_checked = 0;

void report(int criterion, const std::string& description, bool ok,
            const std::string& detail = "") {
  std::printf("[%s] criterion %2d: %s%s%s\n", ok ? "PASS" : "FAIL", criterion,
              description.c_str(), detail.empty() ? "" : " -- ", detail.c_str());
  if (!ok) ++g_failures;
}

MultiTokenNetwork checked(MultiTokenNetwork net) {
  fixtures::check_structure(net);
  ++g_networks_checked;
  return net;
}

double kahan_total(const std::vector<double>& v) {
  KahanSum s;
  for (double x : v) s.add(x);
  return s.value();
}

}  // namespace

// 1. PageRank normalization on 100 random networks with dangling nodes and
//    at least 3 token layers; runtime under 30 s.
static void criterion_1() {
  auto start = std::chrono::steady_clock::now();
  bool ok = true;
  std::string detail;
  for (std::uint64_t seed = 1; seed <= 100 && ok; ++seed) {
    fixtures::RandomNetSpec spec;
    spec.seed = seed;
    spec.ego_entities = 4 + seed % 5;
    spec.alter_entities = 20 + (seed * 7) % 60;
    spec.tokens = 3 + seed % 4;
    spec.records = 150 + (seed * 13) % 550;
    auto fixture = fixtures::random_net(spec);
    auto net = checked(std::move(fixture.net));
    if (net.node_count() > 500) {
      ok = false;
      detail = "generator exceeded 500 nodes";
      break;
    }
    std::size_t dangling = 0;
    for (std::uint32_t i = 0; i < net.node_count(); ++i)
      if (net.out_strength(i) == 0) ++dangling;
    if (dangling == 0 || net.token_layers().size() < 3) {
      ok = false;
      detail = "fixture missing dangling nodes or token layers";
      break;
    }
    auto scores = pagerank(net);
    double total = kahan_total(scores.p);
    if (std::abs(total - 1.0) >= 1e-9) {
      ok = false;
      detail = "sum " + std::to_string(total) + " at seed " + std::to_string(seed);
    }
  }
  auto elapsed = std::chrono::duration_cast<std::chrono::milliseconds>(
                     std::chrono::steady_clock::now() - start)
                     .count();
  if (elapsed >= 30000) {
    ok = false;
    detail = "runtime " + std::to_string(elapsed) + " ms";
  }
  report(1, "pagerank sums to 1 within 1e-9 on 100 random networks, under 30 s", ok, detail);
}

// 2. Power iteration matches a dense direct solve within 1e-8 per entry on
//    25 random networks of at most 50 nodes.
static void criterion_2() {
  bool ok = true;
  std::string detail;
  for (std::uint64_t seed = 200; seed < 225 && ok; ++seed) {
    fixtures::RandomNetSpec spec;
    spec.seed = seed;
    spec.ego_entities = 3;
    spec.alter_entities = 8;
    spec.tokens = 3;
    spec.records = 50;
    auto fixture = fixtures::random_net(spec);
    auto net = checked(std::move(fixture.net));
    if (net.empty()) continue;
    if (net.node_count() > 50) {
      ok = false;
      detail = "fixture exceeded 50 nodes";
      break;
    }
    auto iterated = pagerank(net);
    auto direct = oracle::pagerank_dense(net, 0.85);
    for (std::size_t i = 0; i < direct.size(); ++i) {
      if (std::abs(iterated.p[i] - direct[i]) >= 1e-8) {
        ok = false;
        detail = "entry mismatch at seed " + std::to_string(seed);
        break;
      }
    }
  }
  report(2, "power-iteration pagerank matches dense linear solve within 1e-8", ok, detail);
}

// 3. cheirank(G) equals pagerank(transpose(G)) exactly.
static void criterion_3() {
  bool ok = true;
  for (std::uint64_t seed = 300; seed < 310 && ok; ++seed) {
    auto fixture = fixtures::random_net({.records = 250, .seed = seed});
    auto net = checked(std::move(fixture.net));
    if (net.empty()) continue;
    auto cr = cheirank(net);
    auto pr_t = pagerank(transpose(net));
    if (cr.p != pr_t.p || cr.iterations != pr_t.iterations || cr.residual != pr_t.residual)
      ok = false;
  }
  report(3, "cheirank is exactly pagerank of the transpose on all fixtures", ok);
}

// 4. PCTB bounds and the per-token decomposition identity at 1e-12.
static void criterion_4() {
  bool ok = true;
  std::string detail;
  for (std::uint64_t seed = 400; seed < 412 && ok; ++seed) {
    auto fixture = fixtures::random_net({.tokens = 5, .records = 320, .seed = seed});
    auto net = checked(std::move(fixture.net));
    if (net.empty()) continue;
    auto pr = pagerank(net);
    auto cr = cheirank(net);
    auto pr_users = aggregate(net, pr, Axis::user);
    auto cr_users = aggregate(net, cr, Axis::user);
    auto pr_tokens = aggregate(net, pr, Axis::token);
    auto cr_tokens = aggregate(net, cr, Axis::token);
    auto user_balance = pctb(pr_users, cr_users);
    auto token_balance = pctb(pr_tokens, cr_tokens);
    for (double b : user_balance.scores.values)
      if (b < -1.0 || b > 1.0) ok = false;
    for (double b : token_balance.scores.values)
      if (b < -1.0 || b > 1.0) ok = false;

    auto node_balance = pctb_ut(net, pr, cr, pr_users, cr_users);
    std::map<std::string, KahanSum> per_user;
    for (std::uint32_t i = 0; i < net.node_count(); ++i) {
      if (node_balance[i] < -1.0 || node_balance[i] > 1.0) ok = false;
      per_user[net.node(i).entity].add(node_balance[i]);
    }
    for (const auto& [user, total] : per_user) {
      const double* expected = user_balance.scores.find(user);
      if (expected == nullptr || std::abs(total.value() - *expected) >= 1e-12) {
        ok = false;
        detail = "decomposition identity broke for " + user;
      }
    }
  }
  report(4, "PCTB in [-1,1] and token contributions sum to user balance within 1e-12", ok,
         detail);
}

// 5. Backbone equals the brute-force filter; retained sets nest over alpha.
static void criterion_5() {
  bool ok = true;
  std::string detail;
  for (std::uint64_t seed = 500; seed < 525 && ok; ++seed) {
    fixtures::RandomNetSpec spec;
    spec.seed = seed;
    spec.ego_entities = 4;
    spec.alter_entities = 18;
    spec.tokens = 3;
    spec.records = 160;
    auto fixture = fixtures::random_net(spec);
    auto net = checked(std::move(fixture.net));
    if (net.empty()) continue;
    if (net.edge_count() > 200) {
      ok = false;
      detail = "fixture exceeded 200 edges";
      break;
    }
    std::vector<std::set<std::uint32_t>> retained_sets;
    for (double alpha : {1e-4, 1e-3, 1e-2, 1e-1}) {
      auto result = extract_backbone(net, alpha);
      fixtures::check_structure(result.network);
      auto brute = oracle::backbone_brute(net, alpha);
      if (result.edges.size() != brute.size()) {
        ok = false;
        detail = "edge count mismatch at seed " + std::to_string(seed);
        break;
      }
      std::set<std::uint32_t> kept;
      for (std::size_t i = 0; i < brute.size(); ++i) {
        if (result.edges[i].original_edge != brute[i].edge) ok = false;
        kept.insert(result.edges[i].original_edge);
      }
      retained_sets.push_back(std::move(kept));
    }
    for (std::size_t i = 1; i < retained_sets.size() && ok; ++i)
      if (!std::includes(retained_sets[i].begin(), retained_sets[i].end(),
                         retained_sets[i - 1].begin(), retained_sets[i - 1].end())) {
        ok = false;
        detail = "nesting violated at seed " + std::to_string(seed);
      }
  }
  report(5, "backbone matches brute-force filter and nests monotonically in alpha", ok,
         detail);
}

// 6. SCCs match transitive-closure reachability and diameters match
//    all-pairs shortest paths on 100 random digraphs of up to 12 nodes.
static void criterion_6() {
  bool ok = true;
  std::string detail;
  std::mt19937_64 rng(606);
  for (int trial = 0; trial < 100 && ok; ++trial) {
    std::size_t n = 2 + rng() % 11;
    std::vector<fixtures::EdgeSpec> edges;
    std::set<std::string> egos;
    for (std::size_t i = 0; i < n; ++i) egos.insert("n" + std::to_string(i));
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) {
        if (i == j) continue;
        if (rng() % 100 < 18)
          edges.push_back({"n" + std::to_string(i), "n" + std::to_string(j), "t",
                           1 + rng() % 4});
      }
    if (edges.empty()) continue;
    auto net = checked(fixtures::net_from_edges(edges, egos));
    auto summary = scc_decomposition(net);
    std::vector<std::vector<std::uint32_t>> got;
    for (const auto& comp : summary.components) got.push_back(comp.nodes);
    if (got != oracle::scc_by_reachability(net)) {
      ok = false;
      detail = "component mismatch at trial " + std::to_string(trial);
      break;
    }
    compute_scc_diameters(net, summary);
    for (const auto& comp : summary.components) {
      if (comp.nodes.size() < 2) continue;
      long expected = oracle::diameter_floyd_warshall(net, comp.nodes);
      if (expected < 1 || static_cast<std::uint32_t>(expected) != *comp.diameter) {
        ok = false;
        detail = "diameter mismatch at trial " + std::to_string(trial);
      }
    }
  }
  report(6, "SCCs match transitive closure and diameters match all-pairs BFS", ok, detail);
}

// 7. Louvain modularity is reproduced by the direct formula; the two-clique
//    fixture returns the exhaustively verified optimum.
static void criterion_7() {
  bool ok = true;
  std::string detail;
  for (std::uint64_t seed = 700; seed < 710 && ok; ++seed) {
    auto fixture = fixtures::random_net({.records = 260, .seed = seed});
    auto net = checked(std::move(fixture.net));
    if (net.empty()) continue;
    auto graph = project_undirected(net);
    auto partition = louvain(graph, 1.0, seed);
    double direct = oracle::modularity_direct(graph, partition.community, 1.0);
    if (std::abs(partition.modularity - direct) >= 1e-12) {
      ok = false;
      detail = "modularity mismatch at seed " + std::to_string(seed);
    }
  }

  // two 5-cliques joined by a unit edge
  std::vector<fixtures::EdgeSpec> edges;
  std::set<std::string> egos;
  auto name = [](int c, int i) { return "c" + std::to_string(c) + "_" + std::to_string(i); };
  for (int c = 0; c < 2; ++c)
    for (int i = 0; i < 5; ++i) {
      egos.insert(name(c, i));
      for (int j = i + 1; j < 5; ++j) edges.push_back({name(c, i), name(c, j), "t", 1});
    }
  edges.push_back({name(0, 0), name(1, 0), "t", 1});
  auto clique_net = checked(fixtures::net_from_edges(edges, egos));
  auto graph = project_undirected(clique_net);
  auto partition = louvain(graph, 1.0, 42);
  double best = -2.0;
  oracle::for_each_partition(graph.n, [&](const std::vector<std::uint32_t>& rgs) {
    best = std::max(best, oracle::modularity_direct(graph, rgs, 1.0));
  });
  if (std::abs(partition.modularity - best) >= 1e-12) {
    ok = false;
    detail = "two-clique partition is not the enumerated optimum";
  }
  report(7, "louvain modularity matches direct recomputation; two-clique optimum found", ok,
         detail);
}

// 8. RBO degenerate values exact, symmetry at 1e-15, oracle match at 1e-12.
static void criterion_8() {
  bool ok = true;
  std::vector<std::string> a{"a", "b", "c"};
  std::vector<std::string> b{"a", "c", "b"};
  std::vector<std::string> disjoint{"x", "y", "z"};
  if (rbo(a, a, 0.9) != 1.0) ok = false;
  if (rbo(a, disjoint, 0.9) != 0.0) ok = false;
  if (std::abs(rbo(a, b, 0.9) - rbo(b, a, 0.9)) >= 1e-15) ok = false;
  if (std::abs(rbo(a, b, 0.9) - oracle::rbo_series(a, b, 0.9)) >= 1e-12) ok = false;
  std::vector<std::string> uneven{"a", "c", "q", "r", "s"};
  if (std::abs(rbo(a, uneven, 0.9) - rbo(uneven, a, 0.9)) >= 1e-15) ok = false;
  if (std::abs(rbo(a, uneven, 0.9) - oracle::rbo_series(a, uneven, 0.9)) >= 1e-12) ok = false;
  report(8, "RBO: exact degenerate values, symmetry at 1e-15, oracle match at 1e-12", ok);
}

// 9. Structural invariants on every network this suite constructed.
static void criterion_9() {
  report(9,
         "token closure, ego rule, no self-loops, weight conservation held on " +
             std::to_string(g_networks_checked) + " constructed networks",
         g_networks_checked > 150);
}

// 10. Two consecutive CLI pipeline runs on the committed fixture are
//     byte-identical and finish inside 10 s.
static void criterion_10() {
  const char* cli = std::getenv("MTNET_CLI");
  if (cli == nullptr) {
    report(10, "end-to-end determinism (MTNET_CLI not set)", false);
    return;
  }
  fs::path data = MTNET_TEST_DATA_DIR;
  fs::path out = fs::temp_directory_path() / "mtnet_acceptance_pipeline";

  auto run_pipeline = [&]() -> bool {
    fs::remove_all(out);
    std::string base = std::string(cli) + " ";
    std::string inputs = " --transfers " + (data / "transfers_1k.csv").string() +
                         " --labels " + (data / "labels.csv").string() + " --ego-tags " +
                         (data / "ego_tags.txt").string() + " --allowlist " +
                         (data / "allowlist.txt").string() + " --out-dir " + out.string() +
                         " > /dev/null 2>&1";
    if (std::system((base + "build" + inputs).c_str()) != 0) return false;
    if (std::system((base + "analyze" + inputs).c_str()) != 0) return false;
    if (std::system((base + "temporal --resolution month --group \"Fund Alpha\"" + inputs)
                        .c_str()) != 0)
      return false;
    return true;
  };
  auto hash_dir = [&]() {
    std::map<std::string, std::uint64_t> hashes;
    for (const auto& entry : fs::directory_iterator(out)) {
      std::ifstream is(entry.path(), std::ios::binary);
      std::uint64_t h = 1469598103934665603ull;  // FNV-1a
      char c;
      while (is.get(c)) h = (h ^ static_cast<unsigned char>(c)) * 1099511628211ull;
      hashes[entry.path().filename().string()] = h;
    }
    return hashes;
  };

  auto start = std::chrono::steady_clock::now();
  bool ok = run_pipeline();
  auto first = hash_dir();
  ok = run_pipeline() && ok;
  auto second = hash_dir();
  auto elapsed = std::chrono::duration_cast<std::chrono::milliseconds>(
                     std::chrono::steady_clock::now() - start)
                     .count();
  std::string detail;
  if (first.size() < 15 || first != second) {
    ok = false;
    detail = "output hashes differ between runs";
  }
  if (elapsed >= 10000) {
    ok = false;
    detail = "pipeline took " + std::to_string(elapsed) + " ms";
  }
  report(10, "two consecutive pipeline runs are byte-identical and finish in under 10 s", ok,
         detail);
}

// 11. Per-window centrality series equals standalone runs on the extracted
//     windows, exactly.
static void criterion_11() {
  bool ok = true;
  auto fixture = fixtures::random_net({.records = 350, .seed = 1111});
  checked(fixture.net);
  auto series = snapshot_series(fixture.records, time::Resolution::day, fixture.entities);
  std::unordered_set<std::string> group{fixtures::ego_name(0)};
  auto points = group_centrality_series(series, group);
  if (points.empty()) ok = false;
  for (const auto& pt : points) {
    const auto& snap = series.windows[pt.window];
    std::vector<TransferRecord> window_records;
    for (const auto& r : fixture.records)
      if (r.timestamp >= snap.start && r.timestamp < snap.end) window_records.push_back(r);
    auto standalone = checked(build_mtn(window_records, fixture.entities));
    auto pr = pagerank(standalone);
    auto cr = cheirank(standalone);
    KahanSum p_mass, c_mass;
    for (std::uint32_t i = 0; i < standalone.node_count(); ++i) {
      if (standalone.node(i).entity != fixtures::ego_name(0)) continue;
      p_mass.add(pr.p[i]);
      c_mass.add(cr.p[i]);
    }
    if (pt.pagerank != p_mass.value() || pt.cheirank != c_mass.value()) ok = false;
  }
  report(11, "per-window centrality equals standalone runs on extracted windows, exactly",
         ok);
}

int main() {
  criterion_1();
  criterion_2();
  criterion_3();
  criterion_4();
  criterion_5();
  criterion_6();
  criterion_7();
  criterion_8();
  criterion_9();
  criterion_10();
  criterion_11();
  if (g_failures > 0) {
    std::printf("%d criterion(s) failed\n", g_failures);
    return 1;
  }
  std::printf("all acceptance criteria passed\n");
  return 0;
}
