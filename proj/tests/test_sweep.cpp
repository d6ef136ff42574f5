#include <catch2/catch_amalgamated.hpp>

#include <cstdlib>
#include <sstream>

#include "ppc/ppc.hpp"

using namespace ppc;
using Catch::Approx;

namespace {

Instance small_instance() {
  SensingConfig cfg;
  cfg.num_sensors = 18;
  cfg.num_pois = 8;
  cfg.area_side = 1200.0;
  cfg.cluster_count = 3;
  cfg.cluster_sigma = 150.0;
  cfg.kernel = PayoffKernel::Decaying;
  cfg.seed = 42;
  return generate_sensing_instance(cfg);
}

std::string strip_runtime(const std::string& csv) {
  std::istringstream in(csv);
  std::string line;
  std::string out;
  while (std::getline(in, line)) {
    const auto pos = line.rfind(',');
    out += line.substr(0, pos);
    out += '\n';
  }
  return out;
}

}  // namespace

TEST_CASE("decimal formatting trims to at most six fractional digits") {
  REQUIRE(format_decimal(15.0) == "15");
  REQUIRE(format_decimal(1.5) == "1.5");
  REQUIRE(format_decimal(0.1) == "0.1");
  REQUIRE(format_decimal(0.12345678) == "0.123457");
  REQUIRE(format_decimal(-2.50) == "-2.5");
  REQUIRE(format_decimal(0.0) == "0");
}

TEST_CASE("csv quoting follows the usual escaping rules") {
  REQUIRE(csv_quote("plain") == "plain");
  REQUIRE(csv_quote("a,b") == "\"a,b\"");
  REQUIRE(csv_quote("say \"hi\"") == "\"say \"\"hi\"\"\"");
}

TEST_CASE("csv header is stable") {
  REQUIRE(csv_header() ==
          "method,budget,tau_min,kernel,seed,utility,spent_c,spent_cM,num_selected,"
          "guarantee_factor,runtime_ms");
}

TEST_CASE("method and alpha parsing") {
  REQUIRE(parse_method("ppc_greedy") == Method::PpcGreedy);
  REQUIRE(parse_method("brute_force") == Method::BruteForce);
  REQUIRE_THROWS_AS(parse_method("nope"), ValidationError);
  REQUIRE(parse_alpha("bound").mode == AlphaMode::Bound);
  REQUIRE(parse_alpha("exact").mode == AlphaMode::Exact);
  REQUIRE(parse_alpha("0.25").mode == AlphaMode::Value);
  REQUIRE(parse_alpha("0.25").value == Approx(0.25));
  REQUIRE_THROWS_AS(parse_alpha("maybe"), ValidationError);
}

TEST_CASE("single solve record is budget-consistent") {
  const Instance inst = small_instance();
  const PpcGraph g = inst.graph_at(0.5);
  const auto f = inst.make_objective();
  const RunRecord rec = run_single(inst, g, *f, Method::PpcGreedy, 4.0, 0.5, {}, 0);
  REQUIRE(rec.method == "ppc_greedy");
  REQUIRE(rec.spent_c <= 4.0 + 1e-9);
  REQUIRE(rec.kernel == "decaying");
  REQUIRE(rec.guarantee_factor.has_value());
}

TEST_CASE("exact slope on an oversized instance is an error") {
  const Instance inst = small_instance();  // 18 nodes > default cap of 15
  const PpcGraph g = inst.graph_at(0.5);
  const auto f = inst.make_objective();
  REQUIRE_THROWS_AS(
      run_single(inst, g, *f, Method::PpcGreedy, 4.0, 0.5, {AlphaMode::Exact, 0.0}, 0),
      InstanceTooLargeError);
}

TEST_CASE("sweep emits per-seed random rows plus aggregates, deterministically") {
  const Instance inst = small_instance();
  SweepConfig cfg;
  cfg.budgets = {2.0, 4.0};
  cfg.tau_mins = {0.4, 0.6};
  cfg.fixed_budget = 3.0;
  cfg.fixed_tau_min = 0.5;
  cfg.random_repeats = 4;
  cfg.base_seed = 11;

  std::ostringstream a_csv;
  const std::vector<RunRecord> a = run_sweep(inst, cfg, &a_csv);
  std::ostringstream b_csv;
  run_sweep(inst, cfg, &b_csv);

  REQUIRE(strip_runtime(a_csv.str()) == strip_runtime(b_csv.str()));
  REQUIRE(a_csv.str().rfind(csv_header(), 0) == 0);

  int random_rows = 0;
  int mean_rows = 0;
  int stddev_rows = 0;
  for (const RunRecord& r : a) {
    if (r.method == "random") ++random_rows;
    if (r.method == "random_mean") ++mean_rows;
    if (r.method == "random_stddev") ++stddev_rows;
  }
  const int grid_points = 4;  // (0.5 x {2,4}) + ({0.4, 0.6} x 3)... deduped pairs
  REQUIRE(mean_rows == grid_points);
  REQUIRE(stddev_rows == grid_points);
  REQUIRE(random_rows == grid_points * cfg.random_repeats);

  // aggregate utility really is the mean of the per-seed rows
  for (const RunRecord& mean : a) {
    if (mean.method != "random_mean") continue;
    double sum = 0.0;
    int count = 0;
    for (const RunRecord& r : a) {
      if (r.method == "random" && r.budget == mean.budget && r.tau_min == mean.tau_min) {
        sum += r.utility;
        ++count;
      }
    }
    REQUIRE(count == cfg.random_repeats);
    REQUIRE(mean.utility == Approx(sum / count).margin(1e-9));
  }
}

TEST_CASE("sweep config validation") {
  SweepConfig cfg;
  cfg.budgets.clear();
  REQUIRE_THROWS_AS(cfg.validate(), ValidationError);
  cfg.budgets = {5.0};
  cfg.tau_mins = {0.0};
  REQUIRE_THROWS_AS(cfg.validate(), ValidationError);
  cfg.tau_mins = {0.5};
  cfg.random_repeats = 0;
  REQUIRE_THROWS_AS(cfg.validate(), ValidationError);
}

TEST_CASE("PPC_ENUM_CAP overrides the enumeration caps") {
  REQUIRE(default_bruteforce_cap() == 20);
  REQUIRE(default_slope_cap() == 15);
  setenv("PPC_ENUM_CAP", "9", 1);
  REQUIRE(default_bruteforce_cap() == 9);
  REQUIRE(default_slope_cap() == 9);
  setenv("PPC_ENUM_CAP", "junk", 1);
  REQUIRE(default_bruteforce_cap() == 20);
  unsetenv("PPC_ENUM_CAP");
}

TEST_CASE("sweep grid rebuilds the peer graph per threshold") {
  const Instance inst = small_instance();
  SweepConfig cfg;
  cfg.budgets = {3.0};
  cfg.tau_mins = {0.2, 0.8};
  cfg.fixed_budget = 3.0;
  cfg.fixed_tau_min = 0.5;
  cfg.methods = {Method::PpcGreedy};
  cfg.random_repeats = 1;
  const std::vector<RunRecord> rows = run_sweep(inst, cfg);
  // one row per grid point: tau 0.2, 0.5, 0.8 at budget 3
  REQUIRE(rows.size() == 3);
  REQUIRE(rows[0].tau_min == Approx(0.2));
  REQUIRE(rows[1].tau_min == Approx(0.5));
  REQUIRE(rows[2].tau_min == Approx(0.8));
}
