#pragma once

#include <bit>
#include <cstdint>
#include <iomanip>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "ppc/costs.hpp"
#include "ppc/graph.hpp"
#include "ppc/instances.hpp"
#include "ppc/objectives.hpp"
#include "ppc/rng.hpp"
#include "ppc/solvers.hpp"

namespace ppc {

// ---------------------------------------------------------------------------
// Generators for randomized verification instances.

// Random asymmetric payoff table in which every node is guaranteed at least
// one peer (a partner pair is boosted above the threshold when needed).
inline PayoffModel random_payoff_model(Rng& rng, int n) {
  const Currency tau_max = 1.0;
  const Currency tau_min = rng.uniform(0.35, 0.6);
  const std::size_t nn = static_cast<std::size_t>(n);
  std::vector<Currency> table(nn * nn, 0.0);
  for (std::size_t v = 0; v < nn; ++v) {
    for (std::size_t u = 0; u < nn; ++u) {
      if (v != u) table[v * nn + u] = rng.uniform(0.05, 1.0);
    }
  }
  for (int v = 0; v < n; ++v) {
    bool has_peer = false;
    for (int u = 0; u < n && !has_peer; ++u) {
      if (u == v) continue;
      has_peer = table[static_cast<std::size_t>(v) * nn + static_cast<std::size_t>(u)] >= tau_min &&
                 table[static_cast<std::size_t>(u) * nn + static_cast<std::size_t>(v)] >= tau_min;
    }
    if (!has_peer && n > 1) {
      const int u = (v + 1 + static_cast<int>(rng.uniform_index(static_cast<std::size_t>(n - 1)))) % n;
      table[static_cast<std::size_t>(v) * nn + static_cast<std::size_t>(u)] =
          rng.uniform(tau_min, tau_max);
      table[static_cast<std::size_t>(u) * nn + static_cast<std::size_t>(v)] =
          rng.uniform(tau_min, tau_max);
    }
  }
  return PayoffModel(n, tau_min, tau_max, std::move(table));
}

inline std::vector<std::pair<NodeId, NodeId>> random_simple_graph(Rng& rng, int n,
                                                                  double edge_prob) {
  std::vector<std::pair<NodeId, NodeId>> edges;
  for (NodeId v = 0; v < n; ++v) {
    for (NodeId u = v + 1; u < n; ++u) {
      if (rng.uniform01() < edge_prob) edges.push_back({v, u});
    }
  }
  return edges;
}

inline CoverageObjective random_coverage_objective(Rng& rng, int n) {
  std::vector<Point> pois(static_cast<std::size_t>(2 * n));
  std::vector<Point> sensors(static_cast<std::size_t>(n));
  for (Point& p : pois) p = {rng.uniform(0.0, 1000.0), rng.uniform(0.0, 1000.0)};
  for (Point& p : sensors) p = {rng.uniform(0.0, 1000.0), rng.uniform(0.0, 1000.0)};
  return CoverageObjective(std::move(pois), std::move(sensors), 300.0);
}

inline Selection selection_from_mask(std::uint32_t mask, NodeId n) {
  Selection s(n);
  for (NodeId v = 0; v < n; ++v) {
    if ((mask >> v) & 1U) s.add(v);
  }
  return s;
}

// Exact maximum-clique size by Bron-Kerbosch with pivoting. Kept independent
// of the optimizer so the two can cross-check each other.
inline int max_clique_size(int n, const std::vector<std::pair<NodeId, NodeId>>& edges) {
  std::vector<std::uint32_t> adj(static_cast<std::size_t>(n), 0);
  for (const auto& [a, b] : edges) {
    adj[static_cast<std::size_t>(a)] |= 1U << b;
    adj[static_cast<std::size_t>(b)] |= 1U << a;
  }
  int best = 0;
  const auto bk = [&](auto&& self, int r_size, std::uint32_t p, std::uint32_t x) -> void {
    if (p == 0 && x == 0) {
      best = std::max(best, r_size);
      return;
    }
    if (r_size + std::popcount(p) <= best) return;
    std::uint32_t px = p | x;
    int pivot = std::countr_zero(px);
    int pivot_cover = -1;
    for (std::uint32_t t = px; t != 0; t &= t - 1) {
      const int u = std::countr_zero(t);
      const int cover = std::popcount(p & adj[static_cast<std::size_t>(u)]);
      if (cover > pivot_cover) {
        pivot_cover = cover;
        pivot = u;
      }
    }
    std::uint32_t candidates = p & ~adj[static_cast<std::size_t>(pivot)];
    for (std::uint32_t t = candidates; t != 0; t &= t - 1) {
      const int v = std::countr_zero(t);
      const std::uint32_t bit = 1U << v;
      self(self, r_size + 1, p & adj[static_cast<std::size_t>(v)],
           x & adj[static_cast<std::size_t>(v)]);
      p &= ~bit;
      x |= bit;
    }
  };
  bk(bk, 0, n >= 32 ? ~0U : ((1U << n) - 1U), 0U);
  return best;
}

// ---------------------------------------------------------------------------
// Invariant checks. Each returns a counterexample description on failure.
// The cost function is a parameter so deliberately broken variants can be
// used to confirm the checks have teeth.

template <class CeFn>
std::optional<std::string> check_cost_monotonicity(const PpcGraph& g, CeFn&& ce, long* checks) {
  const NodeId n = g.size();
  const std::uint32_t total = 1U << n;
  std::vector<Currency> value(total, 0.0);
  for (std::uint32_t mask = 1; mask < total; ++mask) {
    value[mask] = ce(selection_from_mask(mask, n), g);
  }
  for (std::uint32_t mask = 0; mask < total; ++mask) {
    for (NodeId v = 0; v < n; ++v) {
      if ((mask >> v) & 1U) continue;
      const std::uint32_t next = mask | (1U << v);
      const Currency marginal = value[next] - value[mask];
      if (checks) ++(*checks);
      if (!(value[next] > value[mask])) {
        std::ostringstream os;
        os << "adding node " << v << " to mask " << mask << " does not increase the cost ("
           << value[mask] << " -> " << value[next] << ")";
        return os.str();
      }
      const Currency singleton = value[1U << v];
      if (singleton > marginal + 1e-9) {
        std::ostringstream os;
        os << "singleton cost " << singleton << " of node " << v << " exceeds marginal "
           << marginal << " at mask " << mask;
        return os.str();
      }
    }
  }
  return std::nullopt;
}

inline std::optional<std::string> check_slope_upper_bound(const PpcGraph& g, long* checks) {
  const SlopeEstimate exact = slope_exact(g);
  const SlopeEstimate bound = slope_bound(g);
  if (checks) ++(*checks);
  if (exact.value > bound.value + 1e-9) {
    std::ostringstream os;
    os << "exact slope " << std::setprecision(17) << exact.value << " exceeds bound "
       << bound.value;
    return os.str();
  }
  return std::nullopt;
}

template <class CeFn>
std::optional<std::string> check_modular_lower_bound(const PpcGraph& g, double alpha_exact,
                                                     CeFn&& ce, long* checks) {
  const NodeId n = g.size();
  const std::uint32_t total = 1U << n;
  for (std::uint32_t mask = 1; mask < total; ++mask) {
    const Selection s = selection_from_mask(mask, n);
    const Currency extended = ce(s, g);
    const Currency modular = cost_cM(s, g);
    if (checks) ++(*checks);
    if (modular > extended + 1e-9) {
      std::ostringstream os;
      os << "modular cost " << modular << " above extended cost " << extended << " at mask "
         << mask;
      return os.str();
    }
    if (modular < (1.0 - alpha_exact) * extended - 1e-9) {
      std::ostringstream os;
      os << "modular cost " << modular << " below (1-slope) * extended = "
         << (1.0 - alpha_exact) * extended << " at mask " << mask;
      return os.str();
    }
  }
  return std::nullopt;
}

inline std::optional<std::string> check_greedy_budget(const PpcGraph& g, const Objective& f,
                                                      Currency budget, long* checks) {
  const SlopeEstimate alpha = slope_exact(g);
  const SolveResult res = ppc_greedy(f, g, budget, alpha);
  if (checks) ++(*checks);
  if (!is_feasible(res.selection, g)) return std::string("greedy output is infeasible");
  if (!within_budget(res.spent_c, budget)) {
    std::ostringstream os;
    os << "greedy spent " << res.spent_c << " over budget " << budget;
    return os.str();
  }
  return std::nullopt;
}

inline std::optional<std::string> check_greedy_approximation(const PpcGraph& g,
                                                             const Objective& f, Currency budget,
                                                             long* checks) {
  const SlopeEstimate alpha = slope_exact(g);
  const GuaranteeParams params = guarantee_params(g, budget, alpha);
  if (!params.gamma_ok) return std::string("instance violates the gamma < 1/2 assumption");
  const SolveResult greedy = ppc_greedy(f, g, budget, alpha);
  const SolveResult opt = brute_force_opt(f, g, budget, CostKind::TrueCost);
  if (checks) ++(*checks);
  if (greedy.utility < params.factor * opt.utility - 1e-9) {
    std::ostringstream os;
    os << std::setprecision(17) << "greedy utility " << greedy.utility << " below factor "
       << params.factor << " * OPT " << opt.utility << " (alpha " << alpha.value << ", r "
       << params.r << ", gamma " << params.gamma << ")";
    return os.str();
  }
  return std::nullopt;
}

inline std::optional<std::string> check_clique_equivalence(
    int n, const std::vector<std::pair<NodeId, NodeId>>& base_edges, Currency tau_min,
    Currency tau_max, long* checks) {
  const CliqueReduction reduction = build_clique_reduction(n, base_edges, tau_min, tau_max);
  const PpcGraph g = reduction.instance.graph();
  const auto f = reduction.instance.make_objective();

  // The reduction prices payments so only base-graph cliques of size >= 2
  // (and the empty set) are affordable feasible selections.
  if (n <= 12) {
    std::vector<std::uint32_t> adj(static_cast<std::size_t>(n), 0);
    for (const auto& [a, b] : base_edges) {
      adj[static_cast<std::size_t>(a)] |= 1U << b;
      adj[static_cast<std::size_t>(b)] |= 1U << a;
    }
    const std::uint32_t total = 1U << n;
    for (std::uint32_t mask = 1; mask < total; ++mask) {
      const Selection s = selection_from_mask(mask, n);
      bool affordable = is_feasible(s, g);
      if (affordable) affordable = within_budget(cost_c(s, g).total, reduction.budget);
      bool clique = std::popcount(mask) >= 2;
      for (std::uint32_t t = mask; clique && t != 0; t &= t - 1) {
        const int v = std::countr_zero(t);
        if ((mask & ~(1U << v) & ~adj[static_cast<std::size_t>(v)]) != 0) clique = false;
      }
      if (checks) ++(*checks);
      if (affordable != clique) {
        std::ostringstream os;
        os << "mask " << mask << ": affordable-feasible=" << affordable << " but clique=" << clique;
        return os.str();
      }
    }
  }

  const SolveResult opt = brute_force_opt(*f, g, reduction.budget, CostKind::ExtendedCost);
  const int clique_size = max_clique_size(n, base_edges);
  const int expected = clique_size >= 2 ? clique_size : 0;
  if (checks) ++(*checks);
  if (static_cast<int>(opt.utility) != expected) {
    std::ostringstream os;
    os << "optimizer found " << opt.utility << " but the maximum clique (>= 2) has size "
       << expected;
    return os.str();
  }
  return std::nullopt;
}

// ---------------------------------------------------------------------------
// Suite runner used by the command-line `verify` and by the acceptance tests.

struct SuiteOutcome {
  explicit SuiteOutcome(std::string name) : suite(std::move(name)) {}

  std::string suite;
  bool passed = true;
  long checks = 0;
  std::string failure;
};

struct VerifyReport {
  std::vector<SuiteOutcome> suites;
  bool all_passed = true;
};

inline VerifyReport run_invariant_suites(bool full, std::uint64_t seed,
                                         std::ostream* log = nullptr) {
  VerifyReport report;
  const auto emit = [&](SuiteOutcome outcome) {
    if (log) {
      *log << (outcome.passed ? "PASS" : "FAIL") << "  " << outcome.suite << "  ("
           << outcome.checks << " checks)";
      if (!outcome.passed) *log << "\n      counterexample: " << outcome.failure;
      *log << "\n";
    }
    report.all_passed = report.all_passed && outcome.passed;
    report.suites.push_back(std::move(outcome));
  };

  {
    SuiteOutcome o{"cost-monotonicity"};
    const int rounds = full ? 50 : 10;
    for (int i = 0; i < rounds && o.passed; ++i) {
      Rng rng(derive_seed(seed, {1, static_cast<std::uint64_t>(i)}));
      const int n = 3 + static_cast<int>(rng.uniform_index(8));  // up to 10
      const PpcGraph g = build_graph(random_payoff_model(rng, n));
      if (auto fail = check_cost_monotonicity(
              g, [](const Selection& s, const PpcGraph& gg) { return cost_ce(s, gg); },
              &o.checks)) {
        o.passed = false;
        o.failure = "instance " + std::to_string(i) + ": " + *fail;
      }
    }
    emit(std::move(o));
  }

  {
    SuiteOutcome o{"slope-upper-bound"};
    const int rounds = full ? 50 : 10;
    for (int i = 0; i < rounds && o.passed; ++i) {
      Rng rng(derive_seed(seed, {2, static_cast<std::uint64_t>(i)}));
      const int n = 3 + static_cast<int>(rng.uniform_index(10));  // up to 12
      const PpcGraph g = build_graph(random_payoff_model(rng, n));
      if (auto fail = check_slope_upper_bound(g, &o.checks)) {
        o.passed = false;
        o.failure = "instance " + std::to_string(i) + ": " + *fail;
      }
    }
    emit(std::move(o));
  }

  {
    SuiteOutcome o{"modular-bound-and-budget"};
    const int rounds = full ? 50 : 10;
    for (int i = 0; i < rounds && o.passed; ++i) {
      Rng rng(derive_seed(seed, {3, static_cast<std::uint64_t>(i)}));
      const int n = 3 + static_cast<int>(rng.uniform_index(10));  // up to 12
      const PpcGraph g = build_graph(random_payoff_model(rng, n));
      const double alpha = slope_exact(g).value;
      if (auto fail = check_modular_lower_bound(
              g, alpha, [](const Selection& s, const PpcGraph& gg) { return cost_ce(s, gg); },
              &o.checks)) {
        o.passed = false;
        o.failure = "instance " + std::to_string(i) + ": " + *fail;
        break;
      }
      const CardinalityObjective f(n);
      const Currency budget = rng.uniform(1.5, 8.0);
      if (auto fail = check_greedy_budget(g, f, budget, &o.checks)) {
        o.passed = false;
        o.failure = "instance " + std::to_string(i) + ": " + *fail;
      }
    }
    emit(std::move(o));
  }

  {
    SuiteOutcome o{"greedy-approximation"};
    const int rounds = full ? 200 : 50;
    for (int i = 0; i < rounds && o.passed; ++i) {
      Rng rng(derive_seed(seed, {4, static_cast<std::uint64_t>(i)}));
      const int n = 4 + static_cast<int>(rng.uniform_index(7));  // up to 10
      const PpcGraph g = build_graph(random_payoff_model(rng, n));
      const double alpha = slope_exact(g).value;
      Currency max_cm = 0.0;
      for (NodeId v = 0; v < n; ++v) max_cm = std::max(max_cm, cost_cm(v, g));
      // Budget keeps every node's modular cost under half the reduced budget
      // and leaves room to seed any pair.
      const Currency floor_budget =
          std::max(2.0 * max_cm, 2.05 * g.tau_max()) / (1.0 - alpha);
      const Currency budget = floor_budget * rng.uniform(1.05, 3.0);
      std::optional<std::string> fail;
      if (i % 2 == 0) {
        const CardinalityObjective f(n);
        fail = check_greedy_approximation(g, f, budget, &o.checks);
      } else {
        const CoverageObjective f = random_coverage_objective(rng, n);
        fail = check_greedy_approximation(g, f, budget, &o.checks);
      }
      if (fail) {
        o.passed = false;
        o.failure = "instance " + std::to_string(i) + ": " + *fail;
      }
    }
    emit(std::move(o));
  }

  {
    SuiteOutcome o{"clique-equivalence"};
    const int rounds = full ? 30 : 10;
    for (int i = 0; i < rounds && o.passed; ++i) {
      Rng rng(derive_seed(seed, {5, static_cast<std::uint64_t>(i)}));
      const int n = 4 + static_cast<int>(rng.uniform_index(9));  // up to 12
      auto edges = random_simple_graph(rng, n, rng.uniform(0.25, 0.6));
      if (edges.empty()) edges.push_back({0, 1});
      if (auto fail = check_clique_equivalence(n, edges, 1.0, 1.0 + n * 1.0, &o.checks)) {
        o.passed = false;
        o.failure = "instance " + std::to_string(i) + ": " + *fail;
      }
    }
    emit(std::move(o));
  }

  return report;
}

}  // namespace ppc
