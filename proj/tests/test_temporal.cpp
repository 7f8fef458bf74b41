#include <doctest.h>

#include <cmath>

#include "fixtures.hpp"
#include "mtnet/temporal.hpp"
#include "oracles.hpp"

using namespace mtnet;
using mtnet::time::Resolution;

namespace {

TransferRecord at(const std::string& iso, const std::string& from, const std::string& to,
                  const std::string& token) {
  TransferRecord r;
  r.block_number = 0;
  r.timestamp = time::parse_timestamp(iso);
  r.tx_hash = "0xh";
  r.from_addr = from;
  r.to_addr = to;
  r.token = token;
  r.value = "1";
  return r;
}

EntityMap egos(std::set<std::string> tags) { return build_entity_map({}, tags); }

}  // namespace

TEST_CASE("snapshot_series: all records in one day collapse at every resolution") {
  auto entities = egos({"0xe"});
  std::vector<TransferRecord> records = {
      at("2022-11-08T01:00:00Z", "0xe", "0xa", "t"),
      at("2022-11-08T13:30:00Z", "0xe", "0xb", "t"),
      at("2022-11-08T23:59:59Z", "0xb", "0xe", "t"),
  };
  for (auto res : {Resolution::day, Resolution::month, Resolution::year}) {
    auto series = snapshot_series(records, res, entities);
    REQUIRE(series.windows.size() == 1);
    CHECK(series.windows[0].network.retained_records() == 3);
    fixtures::check_structure(series.windows[0].network);
  }
}

TEST_CASE("snapshot_series: calendar boundaries split correctly") {
  auto entities = egos({"0xe"});
  std::vector<TransferRecord> records = {
      at("2022-01-31T23:59:59Z", "0xe", "0xa", "t"),
      at("2022-02-01T00:00:00Z", "0xe", "0xb", "t"),
  };
  CHECK(snapshot_series(records, Resolution::year, entities).windows.size() == 1);
  CHECK(snapshot_series(records, Resolution::month, entities).windows.size() == 2);
  CHECK(snapshot_series(records, Resolution::day, entities).windows.size() == 2);

  auto monthly = snapshot_series(records, Resolution::month, entities);
  CHECK(time::format_iso(monthly.windows[0].start) == "2022-01-01T00:00:00Z");
  CHECK(time::format_iso(monthly.windows[0].end) == "2022-02-01T00:00:00Z");
  CHECK(time::format_iso(monthly.windows[1].end) == "2022-03-01T00:00:00Z");
}

TEST_CASE("snapshot_series: empty months are omitted") {
  auto entities = egos({"0xe"});
  std::vector<TransferRecord> records = {
      at("2022-01-10T00:00:00Z", "0xe", "0xa", "t"),
      at("2022-03-10T00:00:00Z", "0xe", "0xb", "t"),  // February silent
  };
  auto series = snapshot_series(records, Resolution::month, entities);
  REQUIRE(series.windows.size() == 2);
  CHECK(time::format_iso(series.windows[0].start) == "2022-01-01T00:00:00Z");
  CHECK(time::format_iso(series.windows[1].start) == "2022-03-01T00:00:00Z");
}

TEST_CASE("snapshot_series: window transaction totals conserve the retained records") {
  auto fixture = fixtures::random_net({.records = 400, .seed = 301});
  auto series = snapshot_series(fixture.records, Resolution::day, fixture.entities);
  std::uint64_t total = 0;
  for (const auto& snap : series.windows) total += snap.network.retained_records();
  CHECK(total == fixture.net.retained_records());
}

TEST_CASE("novelty_ratios: first window all new, repeats not new") {
  auto entities = egos({"0xe"});
  std::vector<TransferRecord> records = {
      at("2022-01-05T00:00:00Z", "0xe", "0xa", "t1"),
      at("2022-02-05T00:00:00Z", "0xe", "0xa", "t1"),  // same participants
      at("2022-03-05T00:00:00Z", "0xe", "0xb", "t1"),  // one new entity of three
      at("2022-03-06T00:00:00Z", "0xe", "0xa", "t1"),
  };
  auto series = snapshot_series(records, Resolution::month, entities);
  auto novelty = novelty_ratios(series);
  REQUIRE(novelty.size() == 3);
  CHECK(novelty[0].new_entity_fraction == doctest::Approx(1.0));
  CHECK(novelty[0].new_token_fraction == doctest::Approx(1.0));
  CHECK(novelty[1].new_entity_fraction == doctest::Approx(0.0));
  CHECK(novelty[1].new_token_fraction == doctest::Approx(0.0));
  CHECK(novelty[2].new_entity_fraction == doctest::Approx(1.0 / 3.0));
  CHECK(novelty[2].new_token_fraction == doctest::Approx(0.0));
}

TEST_CASE("novelty_ratios: zero from window 2 onward on a fixed participant pool") {
  auto entities = egos({"0xe1", "0xe2"});
  std::vector<TransferRecord> records;
  for (int month = 1; month <= 6; ++month) {
    std::string mm = month < 10 ? "0" + std::to_string(month) : std::to_string(month);
    records.push_back(at("2022-" + mm + "-03T00:00:00Z", "0xe1", "0xa1", "t1"));
    records.push_back(at("2022-" + mm + "-04T00:00:00Z", "0xe2", "0xa2", "t2"));
    records.push_back(at("2022-" + mm + "-05T00:00:00Z", "0xa1", "0xe2", "t1"));
  }
  auto series = snapshot_series(records, Resolution::month, entities);
  auto novelty = novelty_ratios(series);
  REQUIRE(novelty.size() == 6);
  for (std::size_t w = 1; w < novelty.size(); ++w) {
    CHECK(novelty[w].new_entity_fraction == 0.0);
    CHECK(novelty[w].new_token_fraction == 0.0);
  }
}

TEST_CASE("ego_activity: direction counts and weight sums") {
  auto entities = egos({"0xe", "0xg"});
  std::vector<TransferRecord> records = {
      // window 1: group sends 4 transfers over one edge
      at("2022-01-05T00:00:00Z", "0xg", "0xa", "t"), at("2022-01-05T01:00:00Z", "0xg", "0xa", "t"),
      at("2022-01-05T02:00:00Z", "0xg", "0xa", "t"), at("2022-01-05T03:00:00Z", "0xg", "0xa", "t"),
      // window 2: group absent, other ego active
      at("2022-02-05T00:00:00Z", "0xe", "0xa", "t"),
      // window 3: both directions
      at("2022-03-05T00:00:00Z", "0xg", "0xa", "t"), at("2022-03-05T01:00:00Z", "0xa", "0xg", "t"),
      at("2022-03-05T02:00:00Z", "0xa", "0xg", "t"), at("2022-03-05T03:00:00Z", "0xe", "0xb", "t"),
  };
  auto series = snapshot_series(records, Resolution::month, entities);
  auto activity = ego_activity(series, {"0xg"});
  REQUIRE(activity.size() == 3);
  CHECK(activity[0].in_edges == 0);
  CHECK(activity[0].out_edges == 1);
  CHECK(activity[0].transactions == 4);
  CHECK(activity[1].in_edges == 0);
  CHECK(activity[1].out_edges == 0);
  CHECK(activity[1].transactions == 0);
  CHECK(activity[2].in_edges == 1);
  CHECK(activity[2].out_edges == 1);
  CHECK(activity[2].transactions == 3);  // 1 out + 2 in, the 0xe edge not counted
  CHECK_THROWS_AS(ego_activity(series, {}), Error);
}

TEST_CASE("group_centrality_series: whole-network group has unit mass and zero balance") {
  auto entities = egos({"0xa", "0xb"});
  std::vector<TransferRecord> records = {
      at("2022-01-05T00:00:00Z", "0xa", "0xb", "t"),
      at("2022-01-06T00:00:00Z", "0xb", "0xa", "t"),
  };
  auto series = snapshot_series(records, Resolution::month, entities);
  auto points = group_centrality_series(series, {"0xa", "0xb"});
  REQUIRE(points.size() == 1);
  CHECK(points[0].pagerank == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(points[0].cheirank == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(points[0].balance == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("group_centrality_series: symmetric cycle member is balanced, star hub spreads") {
  auto entities = egos({"0xa", "0xhub"});
  std::vector<TransferRecord> records = {
      // window 1: symmetric 2-cycle
      at("2022-01-05T00:00:00Z", "0xa", "0xb", "t"),
      at("2022-01-06T00:00:00Z", "0xb", "0xa", "t"),
      // window 2: out-star from hub
      at("2022-02-05T00:00:00Z", "0xhub", "0xl1", "t"),
      at("2022-02-05T01:00:00Z", "0xhub", "0xl2", "t"),
      at("2022-02-05T02:00:00Z", "0xhub", "0xl3", "t"),
  };
  auto series = snapshot_series(records, Resolution::month, entities);

  auto cycle_member = group_centrality_series(series, {"0xa"});
  REQUIRE(cycle_member.size() == 1);  // absent from window 2: no data point
  CHECK(cycle_member[0].window == 0);
  CHECK(cycle_member[0].balance == doctest::Approx(0.0).epsilon(1e-10));

  auto hub = group_centrality_series(series, {"0xhub"});
  REQUIRE(hub.size() == 1);
  CHECK(hub[0].window == 1);
  CHECK(hub[0].balance > 0.0);  // spreader
  // linear-solve oracle confirms cheirank mass exceeds pagerank mass
  const auto& net = series.windows[1].network;
  auto pr = oracle::pagerank_dense(net, 0.85);
  auto cr = oracle::pagerank_dense(transpose(net), 0.85);
  auto hub_node = *net.find_node("0xhub", "t");
  CHECK(cr[hub_node] > pr[hub_node]);
}

TEST_CASE("group_centrality_series equals standalone runs on extracted windows") {
  auto fixture = fixtures::random_net({.records = 200, .seed = 311});
  auto series = snapshot_series(fixture.records, Resolution::day, fixture.entities);
  auto points = group_centrality_series(series, {fixtures::ego_name(0)});
  for (const auto& pt : points) {
    const auto& snap = series.windows[pt.window];
    std::vector<TransferRecord> window_records;
    for (const auto& r : fixture.records)
      if (r.timestamp >= snap.start && r.timestamp < snap.end) window_records.push_back(r);
    auto standalone = build_mtn(window_records, fixture.entities);
    REQUIRE(structurally_equal(standalone, snap.network));
    auto pr = pagerank(standalone);
    auto cr = cheirank(standalone);
    KahanSum p_mass, c_mass;
    for (std::uint32_t i = 0; i < standalone.node_count(); ++i) {
      if (standalone.node(i).entity != fixtures::ego_name(0)) continue;
      p_mass.add(pr.p[i]);
      c_mass.add(cr.p[i]);
    }
    CHECK(pt.pagerank == p_mass.value());  // exact: same code path, same order
    CHECK(pt.cheirank == c_mass.value());
  }
}

TEST_CASE("token_pctb_series: single-token network reduces to the group balance") {
  auto entities = egos({"0xg"});
  std::vector<TransferRecord> records = {
      at("2022-01-05T00:00:00Z", "0xg", "0xa", "t"),
      at("2022-01-06T00:00:00Z", "0xb", "0xg", "t"),
      at("2022-01-07T00:00:00Z", "0xg", "0xa", "t"),
  };
  auto series = snapshot_series(records, Resolution::month, entities);
  auto group_points = group_centrality_series(series, {"0xg"});
  auto token_points = token_pctb_series(series, {"0xg"});
  REQUIRE(group_points.size() == 1);
  REQUIRE(token_points.size() == 1);
  CHECK(token_points[0].token == "t");
  CHECK(token_points[0].balance == doctest::Approx(group_points[0].balance).epsilon(1e-12));
}

TEST_CASE("token_pctb_series: per-token contributions sum to the group balance") {
  auto fixture = fixtures::random_net({.tokens = 3, .records = 240, .seed = 321});
  auto series = snapshot_series(fixture.records, Resolution::month, fixture.entities);
  std::unordered_set<std::string> group{fixtures::ego_name(0), fixtures::ego_name(1)};
  // explicit full token set so the identity covers every token present
  std::set<std::string> all_tokens;
  for (const auto& snap : series.windows)
    for (const auto& node : snap.network.nodes()) all_tokens.insert(node.token);
  auto group_points = group_centrality_series(series, group);
  auto token_points = token_pctb_series(series, group, all_tokens);
  for (const auto& gp : group_points) {
    KahanSum total;
    for (const auto& tp : token_points)
      if (tp.window == gp.window) total.add(tp.balance);
    CHECK(std::abs(total.value() - gp.balance) < 1e-12);
  }
}

TEST_CASE("token_pctb_series: receive-only token negative, send-only token positive") {
  auto entities = egos({"0xg"});
  std::vector<TransferRecord> records = {
      // group only receives token A, only sends token B; two alters make the
      // layers non-trivial
      at("2022-01-05T00:00:00Z", "0xa1", "0xg", "ta"),
      at("2022-01-05T01:00:00Z", "0xa2", "0xg", "ta"),
      at("2022-01-05T02:00:00Z", "0xg", "0xa1", "tb"),
      at("2022-01-05T03:00:00Z", "0xg", "0xa2", "tb"),
  };
  auto series = snapshot_series(records, Resolution::month, entities);
  auto points = token_pctb_series(series, {"0xg"}, std::set<std::string>{"ta", "tb"});
  REQUIRE(points.size() == 2);
  double b_a = points[0].token == "ta" ? points[0].balance : points[1].balance;
  double b_b = points[0].token == "tb" ? points[0].balance : points[1].balance;
  CHECK(b_a < 0.0);
  CHECK(b_b > 0.0);
  // oracle confirms the sign pattern on the window network
  const auto& net = series.windows[0].network;
  auto pr = oracle::pagerank_dense(net, 0.85);
  auto cr = oracle::pagerank_dense(transpose(net), 0.85);
  auto ga = *net.find_node("0xg", "ta");
  auto gb = *net.find_node("0xg", "tb");
  CHECK(cr[ga] < pr[ga]);
  CHECK(cr[gb] > pr[gb]);
}

TEST_CASE("monthly_average: means over days with data only") {
  using mtnet::time::parse_timestamp;
  SUBCASE("one day in a month is that value") {
    std::map<time::UnixSeconds, double> daily{{parse_timestamp("2022-05-10"), 7.5}};
    auto monthly = monthly_average(daily);
    REQUIRE(monthly.size() == 1);
    CHECK(monthly.at(parse_timestamp("2022-05-01")) == doctest::Approx(7.5));
  }
  SUBCASE("two days average, gap days excluded from the denominator") {
    std::map<time::UnixSeconds, double> daily{
        {parse_timestamp("2022-05-02"), 2.0},
        {parse_timestamp("2022-05-30"), 4.0},
        {parse_timestamp("2022-06-01"), 10.0},
        {parse_timestamp("2022-06-04"), 20.0},
        {parse_timestamp("2022-06-05"), 30.0},
    };
    auto monthly = monthly_average(daily);
    REQUIRE(monthly.size() == 2);
    CHECK(monthly.at(parse_timestamp("2022-05-01")) == doctest::Approx(3.0));
    CHECK(monthly.at(parse_timestamp("2022-06-01")) == doctest::Approx(20.0));
  }
}
