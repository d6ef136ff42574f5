#include <catch2/catch_amalgamated.hpp>

#include "oracles.hpp"
#include "ppc/ppc.hpp"

using namespace ppc;
using Catch::Approx;

namespace {

// payoff(v1,v0)=0.5, payoff(v1,v2)=0.9, everything else on the path 0.5;
// the 0-2 pair stays below the threshold so the peer graph is the path.
PpcGraph three_node_path() {
  return build_graph(PayoffModel(3, 0.5, 1.0,
                                 {0.0, 0.5, 0.3,   //
                                  0.5, 0.0, 0.9,   //
                                  0.3, 0.5, 0.0}));
}

PpcGraph mutual_pair(Currency p01, Currency p10) {
  return build_graph(PayoffModel(2, 0.5, 1.0, {0.0, p01, p10, 0.0}));
}

}  // namespace

TEST_CASE("true cost charges each member its best selected peer") {
  const PpcGraph g = mutual_pair(0.6, 0.7);
  REQUIRE(cost_c(Selection(2), g).total == 0.0);

  const CostBreakdown b = cost_c(Selection::of(2, {0, 1}), g);
  REQUIRE(b.total == Approx(1.3));
  REQUIRE(b.per_node[0].peer == 1);
  REQUIRE(b.per_node[1].peer == 0);

  REQUIRE_THROWS_AS(cost_c(Selection::of(2, {0}), g), InfeasibleSelectionError);
}

TEST_CASE("true cost on a triangle matches per-node enumeration") {
  // all payoffs distinct
  const PayoffModel model(3, 0.5, 1.0,
                          {0.0, 0.6, 0.7,   //
                           0.8, 0.0, 0.9,   //
                           0.55, 0.65, 0.0});
  const PpcGraph g = build_graph(model);
  const Selection s = Selection::of(3, {0, 1, 2});
  Currency expected = 0.0;
  for (NodeId v = 0; v < 3; ++v) {
    Currency best = 0.0;
    for (NodeId u = 0; u < 3; ++u) {
      if (u != v) best = std::max(best, model.payoff(v, u));
    }
    expected += best;
  }
  REQUIRE(cost_c(s, g).total == Approx(expected));
}

TEST_CASE("breakdown total equals the sum of per-node payments") {
  Rng rng(30);
  for (int round = 0; round < 20; ++round) {
    const int n = 2 + static_cast<int>(rng.uniform_index(8));
    const PpcGraph g = build_graph(random_payoff_model(rng, n));
    const std::uint32_t mask = static_cast<std::uint32_t>(rng.uniform_index(1U << n));
    const Selection s = selection_from_mask(mask, n);
    if (!is_feasible(s, g)) continue;
    const CostBreakdown b = cost_c(s, g);
    Currency sum = 0.0;
    for (const PeerCharge& c : b.per_node) sum += c.payment;
    REQUIRE(b.total == Approx(sum).margin(1e-12));
    REQUIRE(b.per_node.size() == s.size());
  }
}

TEST_CASE("extended cost equals the true cost on feasible selections") {
  Rng rng(31);
  for (int round = 0; round < 40; ++round) {
    const int n = 2 + static_cast<int>(rng.uniform_index(8));
    const PpcGraph g = build_graph(random_payoff_model(rng, n));
    const std::uint32_t mask = static_cast<std::uint32_t>(rng.uniform_index(1U << n));
    const Selection s = selection_from_mask(mask, n);
    if (!is_feasible(s, g)) continue;
    REQUIRE(cost_ce(s, g) == Approx(cost_c(s, g).total).margin(1e-12));
  }
}

TEST_CASE("extended cost charges unpaired members their worst peer") {
  const PpcGraph g = three_node_path();
  // lone node 1: worst peer payment is min(0.5, 0.9)
  REQUIRE(cost_ce(Selection::of(3, {1}), g) == Approx(0.5));
  // 0 and 2 are not peers: both unpaired
  REQUIRE(cost_ce(Selection::of(3, {0, 2}), g) == Approx(1.0));
}

TEST_CASE("extended cost matches the independently coded expression") {
  Rng rng(32);
  for (int round = 0; round < 60; ++round) {
    const int n = 2 + static_cast<int>(rng.uniform_index(8));
    const PpcGraph g = build_graph(random_payoff_model(rng, n));
    const std::uint32_t mask = static_cast<std::uint32_t>(rng.uniform_index(1U << n));
    const Selection s = selection_from_mask(mask, n);
    REQUIRE(cost_ce(s, g) == Approx(oracle::extended_cost(s, g)).margin(1e-12));
  }
}

TEST_CASE("extended cost rejects isolated members") {
  const PayoffModel model(2, 0.5, 1.0, {0.0, 0.4, 0.4, 0.0});
  const PpcGraph g = build_graph(model);
  REQUIRE_THROWS_AS(cost_ce(Selection::of(2, {0}), g), IsolatedNodeError);
  REQUIRE_THROWS_AS(cost_cm(0, g), IsolatedNodeError);
}

TEST_CASE("marginal extended cost is the definitional difference") {
  Rng rng(33);
  for (int round = 0; round < 60; ++round) {
    const int n = 2 + static_cast<int>(rng.uniform_index(8));
    const PpcGraph g = build_graph(random_payoff_model(rng, n));
    const std::uint32_t mask = static_cast<std::uint32_t>(rng.uniform_index(1U << n));
    const NodeId v = static_cast<NodeId>(rng.uniform_index(static_cast<std::size_t>(n)));
    if ((mask >> v) & 1U) continue;
    const Selection s = selection_from_mask(mask, n);
    Selection with_v = s;
    with_v.add(v);
    const Currency expected = cost_ce(with_v, g) - cost_ce(s, g);
    REQUIRE(marginal_ce(v, s, g) == Approx(expected).margin(1e-12));
  }
}

TEST_CASE("marginal with empty base equals the singleton cost") {
  const PpcGraph g = three_node_path();
  for (NodeId v = 0; v < 3; ++v) {
    REQUIRE(marginal_ce(v, Selection(3), g) == Approx(cost_ce(Selection::of(3, {v}), g)));
  }
}

TEST_CASE("uniform payoffs make every marginal equal the shared value") {
  const PpcGraph g = build_graph(PayoffModel::uniform(4, 0.6, 0.5, 1.0));
  Rng rng(5);
  for (int round = 0; round < 10; ++round) {
    const std::uint32_t mask = static_cast<std::uint32_t>(rng.uniform_index(16));
    const NodeId v = static_cast<NodeId>(rng.uniform_index(4));
    if ((mask >> v) & 1U) continue;
    REQUIRE(marginal_ce(v, selection_from_mask(mask, 4), g) == Approx(0.6));
  }
}

TEST_CASE("modular cost basics") {
  const PpcGraph g = three_node_path();
  REQUIRE(cost_cm(1, g) == Approx(0.5));  // min(0.5, 0.9)
  REQUIRE(cost_cM(Selection(3), g) == 0.0);

  const PpcGraph uniform = build_graph(PayoffModel::uniform(5, 0.7, 0.5, 1.0));
  REQUIRE(cost_cM(Selection::of(5, {0, 2, 4}), uniform) == Approx(2.1));
}

TEST_CASE("single- and two-peer modular costs") {
  const PpcGraph pair = mutual_pair(0.6, 0.8);
  REQUIRE(cost_cm(0, pair) == Approx(0.6));

  const PayoffModel model(3, 0.5, 1.0,
                          {0.0, 0.5, 0.9,   //
                           0.6, 0.0, 0.0,   //
                           0.9, 0.0, 0.0});
  // node 0 pays 0.5 or 0.9 to its two peers
  const PpcGraph g = build_graph(model);
  REQUIRE(cost_cm(0, g) == Approx(0.5));
}

TEST_CASE("clique-reduction modular cost is the threshold for base-graph neighbors") {
  const CliqueReduction red = build_clique_reduction(4, {{0, 1}, {1, 2}}, 1.0, 10.0);
  const PpcGraph g = red.instance.graph();
  REQUIRE(cost_cm(0, g) == Approx(1.0));
  REQUIRE(cost_cm(1, g) == Approx(1.0));
  REQUIRE(cost_cm(3, g) == Approx(10.0));  // no base-graph neighbor
}

TEST_CASE("modular cost lower-bounds the extended cost, exhaustively") {
  Rng rng(34);
  for (int round = 0; round < 10; ++round) {
    const int n = 3 + static_cast<int>(rng.uniform_index(8));  // up to 10
    const PpcGraph g = build_graph(random_payoff_model(rng, n));
    const std::uint32_t total = 1U << n;
    for (std::uint32_t mask = 1; mask < total; ++mask) {
      const Selection s = selection_from_mask(mask, n);
      REQUIRE(cost_cM(s, g) <= cost_ce(s, g) + 1e-9);
    }
  }
}

TEST_CASE("per-node modular cost stays within the payment bounds") {
  Rng rng(38);
  for (int round = 0; round < 20; ++round) {
    const int n = 2 + static_cast<int>(rng.uniform_index(9));
    const PpcGraph g = build_graph(random_payoff_model(rng, n));
    for (NodeId v = 0; v < n; ++v) {
      if (g.degree(v) == 0) continue;
      const Currency cm = cost_cm(v, g);
      REQUIRE(cm >= g.tau_min());
      REQUIRE(cm <= g.tau_max());
    }
  }
}

TEST_CASE("modular cost is additive over disjoint splits") {
  Rng rng(35);
  for (int round = 0; round < 20; ++round) {
    const int n = 3 + static_cast<int>(rng.uniform_index(8));
    const PpcGraph g = build_graph(random_payoff_model(rng, n));
    const std::uint32_t all = static_cast<std::uint32_t>(rng.uniform_index(1U << n));
    const std::uint32_t a = all & static_cast<std::uint32_t>(rng.uniform_index(1U << n));
    const std::uint32_t b = all & ~a;
    const Currency whole = cost_cM(selection_from_mask(all, n), g);
    const Currency parts = cost_cM(selection_from_mask(a, n), g) +
                           cost_cM(selection_from_mask(b, n), g);
    REQUIRE(whole == Approx(parts).margin(1e-12));
  }
}

TEST_CASE("slope bound formula") {
  {
    const PpcGraph g = build_graph(PayoffModel(3, 0.5, 1.0,
                                               {0.0, 0.9, 0.9,   //
                                                0.9, 0.0, 0.4,   //
                                                0.9, 0.4, 0.0}));
    REQUIRE(g.omega() == 2);
    REQUIRE(slope_bound(g).value == Approx(0.75));
    REQUIRE(slope_bound(g).kind == SlopeKind::UpperBound);
  }
  {
    const PpcGraph g = build_graph(PayoffModel::uniform(2, 0.5, 0.5, 0.5));
    REQUIRE(slope_bound(g).value == Approx(0.0));
  }
  {
    // tau_min = 0.1, tau_max = 1, omega = 10
    const PpcGraph g = build_graph(PayoffModel::uniform(11, 0.9, 0.1, 1.0));
    REQUIRE(g.omega() == 10);
    REQUIRE(slope_bound(g).value == Approx(0.99));
  }
  {
    const PpcGraph g = build_graph(PayoffModel(2, 0.5, 1.0, {0.0, 0.4, 0.4, 0.0}));
    REQUIRE_THROWS_AS(slope_bound(g), IsolatedNodeError);
  }
}

TEST_CASE("uniform payoffs have zero slope") {
  const PpcGraph g = build_graph(PayoffModel::uniform(5, 0.6, 0.5, 1.0));
  REQUIRE(slope_exact(g).value == Approx(0.0).margin(1e-12));
}

TEST_CASE("three-node path slope by full enumeration") {
  const PpcGraph g = three_node_path();
  const SlopeEstimate exact = slope_exact(g);
  REQUIRE(exact.kind == SlopeKind::Exact);
  // worst ratio is 0.5 / 0.9, reached when node 1 joins {0, 2}
  REQUIRE(exact.value == Approx(4.0 / 9.0).margin(1e-12));
  REQUIRE(exact.value == Approx(oracle::slope(g)).margin(1e-12));
  REQUIRE(exact.value <= slope_bound(g).value + 1e-9);
}

TEST_CASE("exact slope stays below the bound on random instances") {
  Rng rng(36);
  for (int round = 0; round < 15; ++round) {
    const int n = 3 + static_cast<int>(rng.uniform_index(8));
    const PpcGraph g = build_graph(random_payoff_model(rng, n));
    const SlopeEstimate exact = slope_exact(g);
    REQUIRE(exact.value <= slope_bound(g).value + 1e-9);
    REQUIRE(exact.value >= 0.0);
    REQUIRE(exact.value < 1.0);
    REQUIRE(exact.value == Approx(oracle::slope(g)).margin(1e-10));
  }
}

TEST_CASE("restricted slope enumeration agrees with the full one") {
  Rng rng(37);
  for (int round = 0; round < 12; ++round) {
    const int n = 3 + static_cast<int>(rng.uniform_index(10));  // up to 12
    const PpcGraph g = build_graph(random_payoff_model(rng, n));
    REQUIRE(slope_exact_restricted(g, 22).value ==
            Approx(slope_exact(g).value).margin(1e-12));
  }
}

TEST_CASE("exact slope enforces the enumeration cap") {
  const PpcGraph g = build_graph(PayoffModel::uniform(6, 0.6, 0.5, 1.0));
  REQUIRE_THROWS_AS(slope_exact(g, 5), InstanceTooLargeError);
}
