#include <catch2/catch_amalgamated.hpp>

#include "oracles.hpp"
#include "ppc/ppc.hpp"

using namespace ppc;
using Catch::Approx;

namespace {

CoverageObjective random_geometry(Rng& rng, int sensors, int pois) {
  std::vector<Point> ps(static_cast<std::size_t>(pois));
  std::vector<Point> ss(static_cast<std::size_t>(sensors));
  for (Point& p : ps) p = {rng.uniform(0.0, 1200.0), rng.uniform(0.0, 1200.0)};
  for (Point& p : ss) p = {rng.uniform(0.0, 1200.0), rng.uniform(0.0, 1200.0)};
  return CoverageObjective(std::move(ps), std::move(ss), 300.0);
}

}  // namespace

TEST_CASE("coverage counts POIs within range of a selected sensor") {
  {
    const CoverageObjective obj({{0, 0}}, {{100, 0}}, 236.0);
    REQUIRE(obj.value(Selection(1)) == 0.0);
    REQUIRE(obj.value(Selection::of(1, {0})) == 1.0);
  }
  {
    const CoverageObjective obj({{0, 0}, {300, 0}, {600, 0}}, {{0, 0}, {600, 0}}, 236.0);
    REQUIRE(obj.value(Selection::of(2, {0, 1})) == 2.0);  // middle POI 300m from both
  }
}

TEST_CASE("boundary distances count as covered") {
  const CoverageObjective obj({{236, 0}}, {{0, 0}}, 236.0);
  REQUIRE(obj.value(Selection::of(1, {0})) == 1.0);
}

TEST_CASE("cardinality objective counts members") {
  const CardinalityObjective obj(5);
  REQUIRE(obj.value(Selection(5)) == 0.0);
  REQUIRE(cardinality_value(Selection::of(5, {3})) == 1.0);
  REQUIRE(obj.value(Selection::of(5, {0, 1, 2})) == 3.0);
  REQUIRE(obj.gain(4, Selection::of(5, {0})) == 1.0);
}

TEST_CASE("marginal gain is the value difference, exactly") {
  Rng rng(11);
  const CoverageObjective obj = random_geometry(rng, 12, 25);
  for (int round = 0; round < 40; ++round) {
    const std::uint32_t mask = static_cast<std::uint32_t>(rng.uniform_index(1U << 12));
    const NodeId v = static_cast<NodeId>(rng.uniform_index(12));
    if ((mask >> v) & 1U) continue;
    const Selection s = selection_from_mask(mask, 12);
    Selection with_v = s;
    with_v.add(v);
    REQUIRE(marginal_gain(v, s, obj) + obj.value(s) == obj.value(with_v));
  }
}

TEST_CASE("coverage is monotone and submodular on random geometry") {
  Rng rng(12);
  for (int round = 0; round < 30; ++round) {
    const CoverageObjective obj = random_geometry(rng, 10, 20);
    const std::uint32_t small = static_cast<std::uint32_t>(rng.uniform_index(1U << 10));
    const std::uint32_t big = small | static_cast<std::uint32_t>(rng.uniform_index(1U << 10));
    const NodeId v = static_cast<NodeId>(rng.uniform_index(10));
    if ((big >> v) & 1U) continue;
    const Selection s_small = selection_from_mask(small, 10);
    const Selection s_big = selection_from_mask(big, 10);
    REQUIRE(obj.value(s_small) <= obj.value(s_big));
    REQUIRE(marginal_gain(v, s_small, obj) >= marginal_gain(v, s_big, obj));
  }
}

TEST_CASE("coverage matches the from-scratch recount") {
  Rng rng(13);
  const CoverageObjective obj = random_geometry(rng, 15, 30);
  for (int round = 0; round < 25; ++round) {
    const std::uint32_t mask = static_cast<std::uint32_t>(rng.uniform_index(1U << 15));
    const Selection s = selection_from_mask(mask, 15);
    REQUIRE(obj.value(s) == oracle::coverage(s, obj.pois(), obj.sensors(), obj.radius()));
  }
}

TEST_CASE("tracker agrees with from-scratch evaluation while a selection grows") {
  Rng rng(14);
  const CoverageObjective obj = random_geometry(rng, 14, 28);
  auto tracker = obj.make_tracker();
  Selection s(14);
  std::vector<NodeId> order{3, 7, 0, 11, 5, 9, 1};
  for (std::size_t i = 0; i < order.size(); ++i) {
    const NodeId v = order[i];
    REQUIRE(tracker->gain(v) == obj.gain(v, s));
    if (i + 1 < order.size()) {
      const NodeId w = order[i + 1];
      Selection s_uv = s;
      s_uv.add(v);
      s_uv.add(w);
      REQUIRE(tracker->gain_pair(v, w) == obj.value(s_uv) - obj.value(s));
    }
    tracker->add(v);
    s.add(v);
    REQUIRE(tracker->utility() == obj.value(s));
  }
}

TEST_CASE("zero marginal when nothing new is covered") {
  const CoverageObjective obj({{0, 0}}, {{10, 0}, {20, 0}}, 236.0);
  const Selection s = Selection::of(2, {0});
  REQUIRE(marginal_gain(1, s, obj) == 0.0);
}
