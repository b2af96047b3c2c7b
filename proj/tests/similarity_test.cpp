#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <sstream>

#include "linkpred/edge_list.hpp"
#include "linkpred/similarity.hpp"
#include "oracles.hpp"
#include "test_util.hpp"

using namespace linkpred;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

WeightedGraph from_text(std::string_view text) { return load_edge_list(text); }

}  // namespace

TEST_CASE("index kind names", "[similarity]") {
  for (IndexKind k : kAllIndexKinds) {
    REQUIRE(index_kind_from(to_string(k)) == k);
  }
  REQUIRE_FALSE(index_kind_from("katz").has_value());
  REQUIRE_FALSE(index_kind_from("cn").has_value());

  REQUIRE_FALSE(uses_weights(IndexKind::CN));
  REQUIRE(uses_weights(IndexKind::WCN));
  REQUIRE(uses_weights(IndexKind::rWRA));
  REQUIRE_FALSE(reliable_route(IndexKind::WRA));
  REQUIRE(reliable_route(IndexKind::rWCN));
}

TEST_CASE("weight regularization", "[similarity]") {
  SECTION("known values") {
    REQUIRE_THAT(regularize_weight(1.0), WithinAbs(0.36787944117144233, 1e-15));
    REQUIRE_THAT(regularize_weight(2.0), WithinAbs(0.6065306597126334, 1e-15));
  }
  SECTION("monotone and strictly inside the unit interval") {
    double prev = 0.0;
    for (double w : {0.1, 0.5, 1.0, 2.0, 5.0, 50.0}) {
      const double wp = regularize_weight(w);
      REQUIRE(wp > prev);
      REQUIRE(wp > 0.0);
      REQUIRE(wp < 1.0);
      prev = wp;
    }
  }
  SECTION("rejects nonpositive and extreme inputs") {
    REQUIRE_THROWS_AS(regularize_weight(0.0), std::domain_error);
    REQUIRE_THROWS_AS(regularize_weight(-1.0), std::domain_error);
    REQUIRE_THROWS_AS(regularize_weight(1e-310), std::domain_error);
    REQUIRE_THROWS_AS(regularize_weight(1e300), std::domain_error);
  }
  SECTION("inverse known values and round trip") {
    REQUIRE_THAT(unregularize_weight(std::exp(-1.0)), WithinAbs(1.0, 1e-12));
    REQUIRE_THAT(unregularize_weight(0.9), WithinAbs(9.491221581029905, 1e-12));
    REQUIRE_THAT(unregularize_weight(regularize_weight(3.7)), WithinRel(3.7, 1e-12));
    REQUIRE_THROWS_AS(unregularize_weight(0.0), std::domain_error);
    REQUIRE_THROWS_AS(unregularize_weight(1.0), std::domain_error);
    REQUIRE_THROWS_AS(unregularize_weight(-0.2), std::domain_error);
  }
  SECTION("graph transform keeps topology and maps every weight") {
    const WeightedGraph g = testutil::random_graph(25, 70, 21);
    const WeightedGraph t = regularize_weights(g);
    REQUIRE(t.node_count() == g.node_count());
    REQUIRE(t.edge_count() == g.edge_count());
    const auto& before = g.edges();
    const auto& after = t.edges();
    for (std::size_t i = 0; i < before.size(); ++i) {
      REQUIRE(before[i].u == after[i].u);
      REQUIRE(before[i].v == after[i].v);
      REQUIRE_THAT(after[i].weight, WithinAbs(regularize_weight(before[i].weight), 1e-15));
    }
  }
}

TEST_CASE("pair scores on a two-hop route", "[similarity]") {
  const WeightedGraph g = from_text("x z 0.5\nz y 0.5");
  const NodeId x = *g.find_node("x");
  const NodeId y = *g.find_node("y");

  REQUIRE_THAT(score_pair(g, IndexKind::CN, x, y), WithinAbs(1.0, 1e-15));
  REQUIRE_THAT(score_pair(g, IndexKind::RA, x, y), WithinAbs(0.5, 1e-15));
  REQUIRE_THAT(score_pair(g, IndexKind::AA, x, y), WithinAbs(1.4426950408889634, 1e-15));
  REQUIRE_THAT(score_pair(g, IndexKind::WCN, x, y), WithinAbs(1.0, 1e-15));
  REQUIRE_THAT(score_pair(g, IndexKind::WAA, x, y), WithinAbs(1.4426950408889634, 1e-15));
  REQUIRE_THAT(score_pair(g, IndexKind::WRA, x, y), WithinAbs(1.0, 1e-15));
  REQUIRE_THAT(score_pair(g, IndexKind::rWCN, x, y), WithinAbs(0.25, 1e-15));
  REQUIRE_THAT(score_pair(g, IndexKind::rWAA, x, y), WithinAbs(0.36067376022224085, 1e-15));
  REQUIRE_THAT(score_pair(g, IndexKind::rWRA, x, y), WithinAbs(0.25, 1e-15));
}

TEST_CASE("pair score edge cases", "[similarity]") {
  const WeightedGraph g = from_text("a b 1\nb c 1\nc d 1");
  const NodeId a = *g.find_node("a");
  const NodeId d = *g.find_node("d");

  SECTION("no common neighbor means zero for every kind") {
    for (IndexKind k : kAllIndexKinds) REQUIRE(score_pair(g, k, a, d) == 0.0);
  }
  SECTION("adjacent pairs may be scored directly") {
    REQUIRE(score_pair(g, IndexKind::CN, a, *g.find_node("b")) == 0.0);
  }
  SECTION("same node or unknown node is rejected") {
    REQUIRE_THROWS_AS(score_pair(g, IndexKind::CN, a, a), std::invalid_argument);
    REQUIRE_THROWS_AS(score_pair(g, IndexKind::CN, a, 99), std::out_of_range);
  }
  SECTION("symmetry on random graphs") {
    const WeightedGraph r = testutil::random_graph(30, 90, 17);
    Rng rng(5);
    for (int i = 0; i < 200; ++i) {
      const auto x = static_cast<NodeId>(rng.below(r.node_count()));
      const auto y = static_cast<NodeId>(rng.below(r.node_count()));
      if (x == y) continue;
      for (IndexKind k : kAllIndexKinds)
        REQUIRE(score_pair(r, k, x, y) == score_pair(r, k, y, x));
    }
  }
}

TEST_CASE("candidate pair enumeration", "[similarity]") {
  SECTION("two-hop path ends are the only candidates") {
    const WeightedGraph g = from_text("a b 1\nb c 1");
    const auto pairs = candidate_pairs(g);
    REQUIRE(pairs.size() == 1);
    REQUIRE(pairs[0] == make_pair_of(*g.find_node("a"), *g.find_node("c")));
  }
  SECTION("complete graphs have no candidates") {
    REQUIRE(candidate_pairs(from_text("a b 1\nb c 1\na c 1")).empty());
  }
  SECTION("star leaves pair up completely") {
    const WeightedGraph g = from_text("hub a 1\nhub b 1\nhub c 1\nhub d 1");
    REQUIRE(candidate_pairs(g).size() == 6);
  }
  SECTION("equals brute enumeration, sorted, without duplicates") {
    for (std::uint64_t seed : {1u, 2u, 3u}) {
      const WeightedGraph g = testutil::random_graph(40, 110, seed);
      const auto pairs = candidate_pairs(g);
      REQUIRE(std::is_sorted(pairs.begin(), pairs.end()));
      REQUIRE(std::adjacent_find(pairs.begin(), pairs.end()) == pairs.end());
      std::vector<NodePair> expected;
      for (NodeId x = 0; x < g.node_count(); ++x)
        for (NodeId y = x + 1; y < g.node_count(); ++y)
          if (!g.has_edge(x, y) && oracle::pair_score(g, IndexKind::CN, x, y) > 0.0)
            expected.push_back({x, y});
      REQUIRE(pairs == expected);
    }
  }
}

TEST_CASE("score table construction", "[similarity]") {
  auto labels = std::make_shared<const std::vector<std::string>>(
      std::vector<std::string>{"a", "b", "c", "d"});

  SECTION("entries are sorted and validated") {
    auto t = ScoreTable::from_entries(IndexKind::CN, 7, labels,
                                      {{1, 3, 0.5}, {0, 2, 1.5}});
    REQUIRE(t.size() == 2);
    REQUIRE(t.entries()[0].lo == 0);
    REQUIRE(t.max_score() == 1.5);
    REQUIRE(t.score_of(3, 1) == 0.5);
    REQUIRE(t.score_of(0, 3) == 0.0);
    REQUIRE(t.kind() == IndexKind::CN);
    REQUIRE(t.source_fingerprint() == 7);
  }
  SECTION("bad entries are rejected") {
    REQUIRE_THROWS_AS(ScoreTable::from_entries(IndexKind::CN, 0, labels, {{2, 2, 1.0}}),
                      std::invalid_argument);
    REQUIRE_THROWS_AS(ScoreTable::from_entries(IndexKind::CN, 0, labels, {{3, 1, 1.0}}),
                      std::invalid_argument);
    REQUIRE_THROWS_AS(ScoreTable::from_entries(IndexKind::CN, 0, labels, {{0, 9, 1.0}}),
                      std::invalid_argument);
    REQUIRE_THROWS_AS(ScoreTable::from_entries(IndexKind::CN, 0, labels, {{0, 1, 0.0}}),
                      std::invalid_argument);
    REQUIRE_THROWS_AS(
        ScoreTable::from_entries(IndexKind::CN, 0, labels, {{0, 1, 1.0}, {0, 1, 2.0}}),
        std::invalid_argument);
  }
  SECTION("ranking breaks score ties by label pair") {
    auto t = ScoreTable::from_entries(IndexKind::CN, 0, labels,
                                      {{0, 1, 0.5}, {0, 2, 0.5}, {1, 2, 0.9}});
    const auto order = t.ranking();
    REQUIRE(t.entries()[order[0]].score == 0.9);
    REQUIRE(t.pair_labels(t.entries()[order[1]]) ==
            std::pair<std::string_view, std::string_view>{"a", "b"});
    REQUIRE(t.pair_labels(t.entries()[order[2]]) ==
            std::pair<std::string_view, std::string_view>{"a", "c"});
  }
  SECTION("text export is ordered and label based") {
    auto t = ScoreTable::from_entries(IndexKind::CN, 0, labels, {{0, 1, 0.25}, {2, 3, 2.0}});
    std::ostringstream out;
    t.write_text(out);
    REQUIRE(out.str() == "c d 2\na b 0.25\n");
  }
}

TEST_CASE("full scoring matches the brute-force reference", "[similarity][oracle]") {
  for (std::uint64_t seed : {11u, 22u, 33u}) {
    const WeightedGraph g = testutil::random_graph(45, 140, seed);
    for (IndexKind kind : kAllIndexKinds) {
      const ScoreTable table = score_all(g, kind);
      const auto expected = oracle::all_scores(g, kind);
      REQUIRE(table.size() == expected.size());
      for (const auto& e : table.entries()) {
        const auto it = expected.find({e.lo, e.hi});
        REQUIRE(it != expected.end());
        REQUIRE_THAT(e.score, WithinAbs(it->second, 1e-12));
        REQUIRE(std::isfinite(e.score));
      }
      REQUIRE(table.source_fingerprint() == g.fingerprint());
    }
  }
}

TEST_CASE("scoring examples and degeneracies", "[similarity]") {
  SECTION("two-hop path under the route-product family") {
    const WeightedGraph g = from_text("a b 0.5\nb c 0.5");
    const ScoreTable t = score_all(g, IndexKind::rWRA);
    REQUIRE(t.size() == 1);
    REQUIRE_THAT(t.entries()[0].score, WithinAbs(0.25, 1e-15));
  }
  SECTION("complete graph scores nothing") {
    REQUIRE(score_all(from_text("a b 1\nb c 1\na c 1"), IndexKind::WAA).empty());
  }
  SECTION("unit weights collapse the weighted kinds onto the plain ones") {
    for (std::uint64_t seed : {4u, 5u}) {
      const WeightedGraph g = testutil::random_graph(35, 100, seed, 5.0, true);
      const ScoreTable cn = score_all(g, IndexKind::CN);
      const ScoreTable ra = score_all(g, IndexKind::RA);
      const ScoreTable wcn = score_all(g, IndexKind::WCN);
      const ScoreTable rwcn = score_all(g, IndexKind::rWCN);
      const ScoreTable wra = score_all(g, IndexKind::WRA);
      const ScoreTable rwra = score_all(g, IndexKind::rWRA);
      const ScoreTable waa = score_all(g, IndexKind::WAA);
      const ScoreTable rwaa = score_all(g, IndexKind::rWAA);
      REQUIRE(cn.size() == wcn.size());
      for (std::size_t i = 0; i < cn.size(); ++i) {
        REQUIRE_THAT(wcn.entries()[i].score, WithinAbs(2.0 * cn.entries()[i].score, 1e-12));
        REQUIRE_THAT(rwcn.entries()[i].score, WithinAbs(cn.entries()[i].score, 1e-12));
        REQUIRE_THAT(wra.entries()[i].score, WithinAbs(2.0 * ra.entries()[i].score, 1e-12));
        REQUIRE_THAT(rwra.entries()[i].score, WithinAbs(ra.entries()[i].score, 1e-12));
        REQUIRE_THAT(waa.entries()[i].score, WithinAbs(2.0 * rwaa.entries()[i].score, 1e-12));
      }
    }
  }
  SECTION("any log base induces the same ranking of the AA family") {
    const WeightedGraph g = testutil::random_graph(40, 120, 9);
    for (IndexKind kind : {IndexKind::AA, IndexKind::WAA, IndexKind::rWAA}) {
      const auto nat = oracle::all_scores(g, kind);
      const auto base2 = oracle::all_scores(g, kind, 2.0);
      auto order_of = [](const std::map<std::pair<NodeId, NodeId>, double>& scores) {
        std::vector<std::pair<NodeId, NodeId>> pairs;
        for (const auto& [p, s] : scores) pairs.push_back(p);
        std::stable_sort(pairs.begin(), pairs.end(),
                         [&](const auto& a, const auto& b) {
                           return scores.at(a) > scores.at(b);
                         });
        return pairs;
      };
      REQUIRE(order_of(nat) == order_of(base2));
    }
  }
}

TEST_CASE("scoring is identical for any worker count", "[similarity][parallel]") {
  const WeightedGraph g = testutil::random_graph(600, 2400, 123);
  for (IndexKind kind : {IndexKind::CN, IndexKind::rWRA, IndexKind::WAA}) {
    const ScoreTable one = score_all(g, kind, {.workers = 1});
    const ScoreTable four = score_all(g, kind, {.workers = 4});
    const ScoreTable eight = score_all(g, kind, {.workers = 8});
    REQUIRE(one.entries() == four.entries());
    REQUIRE(one.entries() == eight.entries());
  }
}
