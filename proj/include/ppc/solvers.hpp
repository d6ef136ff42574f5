#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <queue>
#include <string>
#include <vector>

#include "ppc/costs.hpp"
#include "ppc/errors.hpp"
#include "ppc/graph.hpp"
#include "ppc/objectives.hpp"
#include "ppc/rng.hpp"
#include "ppc/types.hpp"

namespace ppc {

// Unordered pair of mutual peers; the candidate pool of the greedy solvers.
struct Couple {
  NodeId a;
  NodeId b;
};

inline std::vector<Couple> couple_superset(const PpcGraph& g) {
  std::vector<Couple> z;
  z.reserve(g.edge_count());
  for (NodeId v = 0; v < g.size(); ++v) {
    for (NodeId u : g.peers(v)) {
      if (u > v) z.push_back({v, u});
    }
  }
  return z;
}

// Parameters of the greedy utility guarantee: the slope in use, the largest
// modular-cost ratio between peers, and the largest per-node share of the
// reduced budget.
struct GuaranteeParams {
  double alpha = 0.0;
  double r = 0.0;
  double gamma = 0.0;
  double factor = 0.0;
  // factor recomputed from the payment bounds and peer count alone; present
  // when the budget clears 2 * omega * tau_max^2 / tau_min
  std::optional<double> bounds_only_factor;
  bool gamma_ok = false;        // gamma < 1/2
  bool pair_budget_ok = false;  // (1 - alpha) * B / tau_max > 2
};

inline GuaranteeParams guarantee_params(const PpcGraph& g, Currency budget,
                                        SlopeEstimate alpha) {
  GuaranteeParams p;
  p.alpha = alpha.value;
  if (g.edge_count() == 0) return p;

  const NodeId n = g.size();
  std::vector<Currency> cm(static_cast<std::size_t>(n), 0.0);
  for (NodeId v = 0; v < n; ++v) {
    if (g.degree(v) > 0) cm[static_cast<std::size_t>(v)] = cost_cm(v, g);
  }
  for (NodeId v = 0; v < n; ++v) {
    for (NodeId u : g.peers(v)) {
      p.r = std::max(p.r, cm[static_cast<std::size_t>(v)] / cm[static_cast<std::size_t>(u)]);
    }
  }
  const double reduced = (1.0 - alpha.value) * budget;
  for (NodeId v = 0; v < n; ++v) {
    if (g.degree(v) > 0) p.gamma = std::max(p.gamma, cm[static_cast<std::size_t>(v)] / reduced);
  }
  p.factor = 1.0 - std::exp(-(1.0 - alpha.value) * (1.0 - 2.0 * p.gamma) / (1.0 + p.r));
  p.gamma_ok = p.gamma < 0.5;
  p.pair_budget_ok = reduced / g.tau_max() > 2.0;

  const double omega = static_cast<double>(g.omega());
  const double tmin = g.tau_min();
  const double tmax = g.tau_max();
  if (budget > 2.0 * omega * tmax * tmax / tmin) {
    p.bounds_only_factor =
        1.0 - std::exp(-(tmin * tmin / (omega * tmax * tmax)) *
                       (0.5 - omega * tmax * tmax / (budget * tmin)));
  }
  return p;
}

struct SolveResult {
  explicit SolveResult(Selection sel) : selection(std::move(sel)) {}

  Selection selection;
  double utility = 0.0;
  Currency spent_c = 0.0;   // cost under the best-selected-peer charging rule
  Currency spent_cM = 0.0;  // modular lower-bound cost of the selection
  int iterations = 0;
  bool feasible = true;
  std::optional<GuaranteeParams> guarantee;
};

struct SolverOptions {
  bool lazy = true;  // priority-queue candidate evaluation; the full re-scan
                     // is kept as a reference path for tests
};

namespace detail {

// Strict candidate order: utility-per-modular-cost ratio compared by
// cross-multiplication, then smaller cost, then lexicographic node ids.
inline bool better_candidate(double g1, Currency c1, const Couple& z1, double g2, Currency c2,
                             const Couple& z2) {
  const double lhs = g1 * c2;
  const double rhs = g2 * c1;
  if (lhs != rhs) return lhs > rhs;
  if (c1 != c2) return c1 < c2;
  if (z1.a != z2.a) return z1.a < z2.a;
  return z1.b < z2.b;
}

struct GreedyState {
  const PpcGraph* g;
  std::vector<Couple> z;
  std::vector<Currency> cm;        // per node
  std::vector<char> selected;
  Selection working;
  std::unique_ptr<ObjectiveTracker> tracker;
  Currency remaining = 0.0;
  int iterations = 0;

  GreedyState(const Objective& f, const PpcGraph& graph, const Selection* carried)
      : g(&graph), z(couple_superset(graph)),
        cm(static_cast<std::size_t>(graph.size()), 0.0),
        selected(static_cast<std::size_t>(graph.size()), 0),
        working(graph.size()), tracker(f.make_tracker()) {
    for (NodeId v = 0; v < graph.size(); ++v) {
      if (graph.degree(v) > 0) cm[static_cast<std::size_t>(v)] = cost_cm(v, graph);
    }
    if (carried != nullptr) {
      working = *carried;
      for (NodeId v : carried->members()) {
        selected[static_cast<std::size_t>(v)] = 1;
        tracker->add(v);
      }
    }
  }

  Currency fresh_cost(const Couple& c) const {
    Currency out = 0.0;
    if (!selected[static_cast<std::size_t>(c.a)]) out += cm[static_cast<std::size_t>(c.a)];
    if (!selected[static_cast<std::size_t>(c.b)]) out += cm[static_cast<std::size_t>(c.b)];
    return out;
  }

  double fresh_gain(const Couple& c) const {
    const bool na = !selected[static_cast<std::size_t>(c.a)];
    const bool nb = !selected[static_cast<std::size_t>(c.b)];
    if (na && nb) return tracker->gain_pair(c.a, c.b);
    if (na) return tracker->gain(c.a);
    if (nb) return tracker->gain(c.b);
    return 0.0;
  }

  void select(const Couple& c, Currency cost) {
    if (!selected[static_cast<std::size_t>(c.a)]) {
      selected[static_cast<std::size_t>(c.a)] = 1;
      working.add(c.a);
      tracker->add(c.a);
    }
    if (!selected[static_cast<std::size_t>(c.b)]) {
      selected[static_cast<std::size_t>(c.b)] = 1;
      working.add(c.b);
      tracker->add(c.b);
    }
    remaining -= cost;
    ++iterations;
  }
};

inline void greedy_loop_naive(GreedyState& st) {
  while (true) {
    int best = -1;
    double best_gain = 0.0;
    Currency best_cost = 0.0;
    for (std::size_t i = 0; i < st.z.size(); ++i) {
      const Currency cost = st.fresh_cost(st.z[i]);
      if (cost <= 0.0) continue;  // both members already selected
      if (!within_budget(cost, st.remaining)) continue;
      const double gain = st.fresh_gain(st.z[i]);
      if (gain <= 0.0) continue;  // cannot raise a monotone objective
      if (best < 0 || better_candidate(gain, cost, st.z[i], best_gain, best_cost,
                                       st.z[static_cast<std::size_t>(best)])) {
        best = static_cast<int>(i);
        best_gain = gain;
        best_cost = cost;
      }
    }
    if (best < 0) break;
    st.select(st.z[static_cast<std::size_t>(best)], best_cost);
  }
}

// Lazy variant: stored gains are upper bounds (marginal gains only shrink),
// and entries are re-pushed with fresh costs whenever a member of the couple
// gets selected, so stored keys always dominate current ratios.
inline void greedy_loop_lazy(GreedyState& st) {
  struct Entry {
    double gain;
    Currency cost;
    int z;
    int version;
    int step;
  };
  struct Worse {
    const std::vector<Couple>* z;
    bool operator()(const Entry& a, const Entry& b) const {
      return better_candidate(b.gain, b.cost, (*z)[static_cast<std::size_t>(b.z)], a.gain,
                              a.cost, (*z)[static_cast<std::size_t>(a.z)]);
    }
  };

  std::vector<int> version(st.z.size(), 0);
  std::vector<char> dead(st.z.size(), 0);
  std::vector<std::vector<int>> incident(st.selected.size());
  for (std::size_t i = 0; i < st.z.size(); ++i) {
    incident[static_cast<std::size_t>(st.z[i].a)].push_back(static_cast<int>(i));
    incident[static_cast<std::size_t>(st.z[i].b)].push_back(static_cast<int>(i));
  }

  std::priority_queue<Entry, std::vector<Entry>, Worse> heap(Worse{&st.z});
  std::vector<double> last_gain(st.z.size(), 0.0);
  int step = 0;
  for (std::size_t i = 0; i < st.z.size(); ++i) {
    const Currency cost = st.fresh_cost(st.z[i]);
    if (cost <= 0.0) {
      dead[i] = 1;
      continue;
    }
    const double gain = st.fresh_gain(st.z[i]);
    if (gain <= 0.0) {
      dead[i] = 1;
      continue;
    }
    last_gain[i] = gain;
    heap.push({gain, cost, static_cast<int>(i), 0, step});
  }

  std::vector<Entry> stashed;  // affordable later, when budget state changes
  while (true) {
    int chosen = -1;
    Currency chosen_cost = 0.0;
    while (!heap.empty()) {
      const Entry e = heap.top();
      heap.pop();
      const std::size_t zi = static_cast<std::size_t>(e.z);
      if (dead[zi] || e.version != version[zi]) continue;
      if (e.step == step) {
        if (!within_budget(e.cost, st.remaining)) {
          stashed.push_back(e);
          continue;
        }
        chosen = e.z;
        chosen_cost = e.cost;
        break;
      }
      const double gain = st.fresh_gain(st.z[zi]);
      if (gain <= 0.0) {
        dead[zi] = 1;
        continue;
      }
      last_gain[zi] = gain;
      heap.push({gain, e.cost, e.z, e.version, step});
    }
    if (chosen < 0) break;

    const Couple& c = st.z[static_cast<std::size_t>(chosen)];
    const NodeId added_a = !st.selected[static_cast<std::size_t>(c.a)] ? c.a : -1;
    const NodeId added_b = !st.selected[static_cast<std::size_t>(c.b)] ? c.b : -1;
    st.select(c, chosen_cost);
    dead[static_cast<std::size_t>(chosen)] = 1;
    ++step;

    // Couples touching a newly selected node got cheaper; re-key them.
    for (NodeId v : {added_a, added_b}) {
      if (v < 0) continue;
      for (int zi : incident[static_cast<std::size_t>(v)]) {
        const std::size_t z = static_cast<std::size_t>(zi);
        if (dead[z]) continue;
        const Currency cost = st.fresh_cost(st.z[z]);
        if (cost <= 0.0) {
          dead[z] = 1;
          continue;
        }
        ++version[z];
        heap.push({last_gain[z], cost, zi, version[z], step - 1});
      }
    }
    for (const Entry& e : stashed) {
      if (dead[static_cast<std::size_t>(e.z)] || e.version != version[static_cast<std::size_t>(e.z)]) {
        continue;
      }
      heap.push(e);
    }
    stashed.clear();
  }
}

}  // namespace detail

// Budgeted ratio greedy over peer couples. Works against a reduced budget
// (1 - alpha) * budget so that the modular spend certifies the true cost of
// the output stays within the full budget. `carried` seeds the working
// selection: utility and marginal costs are evaluated relative to it and its
// members are never charged again.
inline SolveResult ppc_greedy(const Objective& f, const PpcGraph& g, Currency budget,
                              SlopeEstimate alpha, const Selection* carried = nullptr,
                              const SolverOptions& opts = {}) {
  if (!(budget > 0.0)) throw PreconditionError("budget must be positive");
  if (alpha.value >= 1.0) {
    throw InvalidAlphaError("slope " + std::to_string(alpha.value) + " leaves no usable budget");
  }
  if (alpha.value < 0.0) throw InvalidAlphaError("slope must be non-negative");
  if (carried != nullptr && !is_feasible(*carried, g)) {
    throw InfeasibleSelectionError("carried selection is not feasible");
  }

  detail::GreedyState st(f, g, carried);
  st.remaining = (1.0 - alpha.value) * budget;
  if (opts.lazy) {
    detail::greedy_loop_lazy(st);
  } else {
    detail::greedy_loop_naive(st);
  }

  SolveResult out{std::move(st.working)};
  out.utility = st.tracker->utility();
  out.iterations = st.iterations;
  out.feasible = true;
  out.spent_c = cost_c(out.selection, g).total;
  out.spent_cM = cost_cM(out.selection, g);
  out.guarantee = guarantee_params(g, budget, alpha);
  return out;
}

// Re-runs the greedy on whatever true-cost budget remains, carrying the
// selection forward, until an entire pass adds nothing. Never worse than a
// single pass, and the true cost still respects the budget.
inline SolveResult ppc_greedy_iter(const Objective& f, const PpcGraph& g, Currency budget,
                                   SlopeEstimate alpha, const SolverOptions& opts = {}) {
  if (!(budget > 0.0)) throw PreconditionError("budget must be positive");
  Selection working(g.size());
  int iterations = 0;
  Currency remaining = budget;
  while (remaining > 0.0) {
    SolveResult pass = ppc_greedy(f, g, remaining, alpha, &working, opts);
    iterations += pass.iterations;
    if (pass.selection.size() == working.size()) break;
    working = std::move(pass.selection);
    remaining = budget - cost_c(working, g).total;
  }

  SolveResult out{std::move(working)};
  std::unique_ptr<ObjectiveTracker> tracker = f.make_tracker();
  for (NodeId v : out.selection.members()) tracker->add(v);
  out.utility = tracker->utility();
  out.iterations = iterations;
  out.feasible = true;
  out.spent_c = cost_c(out.selection, g).total;
  out.spent_cM = cost_cM(out.selection, g);
  out.guarantee = guarantee_params(g, budget, alpha);
  return out;
}

// Uniformly random couple selection subject to the true-cost budget.
// Deterministic for a fixed seed.
inline SolveResult random_baseline(const Objective& f, const PpcGraph& g, Currency budget,
                                   std::uint64_t seed) {
  if (!(budget > 0.0)) throw PreconditionError("budget must be positive");
  const NodeId n = g.size();
  const std::vector<Couple> z = couple_superset(g);
  Selection working(n);
  std::vector<char> selected(static_cast<std::size_t>(n), 0);
  std::vector<Currency> charge(static_cast<std::size_t>(n), 0.0);
  Currency total = 0.0;
  int iterations = 0;
  Rng rng(seed);

  // Exact cost increase of adding the unselected part of c: the new members'
  // charges plus any raise this causes for their already-selected peers.
  std::vector<NodeId> affected;
  const auto evaluate = [&](const Couple& c) -> std::optional<Currency> {
    const bool na = !selected[static_cast<std::size_t>(c.a)];
    const bool nb = !selected[static_cast<std::size_t>(c.b)];
    if (!na && !nb) return std::nullopt;
    Currency delta = 0.0;
    affected.clear();
    for (const NodeId v : {c.a, c.b}) {
      const bool is_new = (v == c.a) ? na : nb;
      if (!is_new) continue;
      const NodeId other = (v == c.a) ? c.b : c.a;
      Currency best = -1.0;
      for (NodeId p : g.peers(v)) {
        if (selected[static_cast<std::size_t>(p)] || p == other) {
          best = std::max(best, g.payoffs().payoff(v, p));
        }
        if (selected[static_cast<std::size_t>(p)]) affected.push_back(p);
      }
      delta += best;
    }
    std::sort(affected.begin(), affected.end());
    affected.erase(std::unique(affected.begin(), affected.end()), affected.end());
    for (NodeId p : affected) {
      Currency candidate = charge[static_cast<std::size_t>(p)];
      if (na && g.are_peers(p, c.a)) candidate = std::max(candidate, g.payoffs().payoff(p, c.a));
      if (nb && g.are_peers(p, c.b)) candidate = std::max(candidate, g.payoffs().payoff(p, c.b));
      delta += candidate - charge[static_cast<std::size_t>(p)];
    }
    return delta;
  };

  const auto admissible = [&](const Couple& c) -> bool {
    const auto delta = evaluate(c);
    return delta.has_value() && within_budget(total + *delta, budget);
  };

  const auto apply = [&](const Couple& c) {
    const bool na = !selected[static_cast<std::size_t>(c.a)];
    const bool nb = !selected[static_cast<std::size_t>(c.b)];
    for (const NodeId v : {c.a, c.b}) {
      const bool is_new = (v == c.a) ? na : nb;
      if (!is_new) continue;
      selected[static_cast<std::size_t>(v)] = 1;
      working.add(v);
    }
    // Recompute charges of members whose peer set inside the selection grew.
    total = 0.0;
    for (NodeId v : working.members()) {
      Currency best = -1.0;
      for (NodeId p : g.peers(v)) {
        if (selected[static_cast<std::size_t>(p)]) best = std::max(best, g.payoffs().payoff(v, p));
      }
      charge[static_cast<std::size_t>(v)] = best;
      total += best;
    }
    ++iterations;
  };

  if (!z.empty()) {
    while (true) {
      int found = -1;
      for (int attempt = 0; attempt < 32; ++attempt) {
        const std::size_t i = rng.uniform_index(z.size());
        if (admissible(z[i])) {
          found = static_cast<int>(i);
          break;
        }
      }
      if (found < 0) {
        std::vector<int> open;
        for (std::size_t i = 0; i < z.size(); ++i) {
          if (admissible(z[i])) open.push_back(static_cast<int>(i));
        }
        if (open.empty()) break;
        found = open[rng.uniform_index(open.size())];
      }
      apply(z[static_cast<std::size_t>(found)]);
    }
  }

  SolveResult out{std::move(working)};
  std::unique_ptr<ObjectiveTracker> tracker = f.make_tracker();
  for (NodeId v : out.selection.members()) tracker->add(v);
  out.utility = tracker->utility();
  out.iterations = iterations;
  out.feasible = true;
  out.spent_c = total;
  out.spent_cM = cost_cM(out.selection, g);
  return out;
}

// Cost-benefit greedy that assumes every sensor can be rewarded with exactly
// tau_min and ignores peer feasibility. An optimistic upper line for plots;
// its output is not required to be feasible.
inline SolveResult optimistic_greedy(const Objective& f, const PpcGraph& g, Currency budget) {
  if (!(budget > 0.0)) throw PreconditionError("budget must be positive");
  const NodeId n = g.size();
  const Currency tau_min = g.tau_min();
  const NodeId capacity = static_cast<NodeId>(
      std::min<double>(n, std::floor(budget / tau_min + kBudgetTol)));

  Selection working(n);
  std::unique_ptr<ObjectiveTracker> tracker = f.make_tracker();
  int iterations = 0;
  while (static_cast<NodeId>(working.size()) < capacity) {
    NodeId best = -1;
    double best_gain = -1.0;
    for (NodeId v = 0; v < n; ++v) {
      if (working.contains(v)) continue;
      const double gain = tracker->gain(v);
      if (gain > best_gain) {
        best = v;
        best_gain = gain;
      }
    }
    if (best < 0) break;
    working.add(best);
    tracker->add(best);
    ++iterations;
  }

  const bool feasible = is_feasible(working, g);
  SolveResult out{std::move(working)};
  out.utility = tracker->utility();
  out.iterations = iterations;
  out.feasible = feasible;
  // Its own accounting: tau_min per selected node. The true charging rule is
  // undefined for peerless members.
  out.spent_c = tau_min * static_cast<Currency>(out.selection.size());
  out.spent_cM = out.spent_c;
  return out;
}

enum class CostKind { TrueCost, ExtendedCost, ModularCost };

inline int default_bruteforce_cap() { return enumeration_cap(20); }

// Exact maximizer over feasible selections within budget, by pruned subset
// enumeration. Ties break toward the lexicographically smallest member list.
inline SolveResult brute_force_opt(const Objective& f, const PpcGraph& g, Currency budget,
                                   CostKind kind = CostKind::TrueCost,
                                   int cap = default_bruteforce_cap()) {
  const NodeId n = g.size();
  if (n > cap) {
    throw InstanceTooLargeError("exact search needs |V| <= " + std::to_string(cap) + ", got " +
                                std::to_string(n));
  }

  std::vector<NodeId> eligible;
  for (NodeId v = 0; v < n; ++v) {
    if (g.degree(v) > 0) eligible.push_back(v);
  }
  std::vector<Currency> cm(static_cast<std::size_t>(n), 0.0);
  for (NodeId v : eligible) cm[static_cast<std::size_t>(v)] = cost_cm(v, g);

  std::vector<NodeId> members;
  std::vector<NodeId> best_members;
  double best_utility = 0.0;
  bool have_best = true;  // the empty selection is always feasible

  const auto consider = [&](Currency modular_total) {
    // members is sorted ascending by construction
    for (NodeId v : members) {
      bool peered = false;
      for (NodeId u : g.peers(v)) {
        if (std::binary_search(members.begin(), members.end(), u)) {
          peered = true;
          break;
        }
      }
      if (!peered) return;
    }
    Selection s(n);
    for (NodeId v : members) s.add(v);
    Currency cost = 0.0;
    switch (kind) {
      case CostKind::TrueCost:
        cost = members.empty() ? 0.0 : cost_c(s, g).total;
        break;
      case CostKind::ExtendedCost:
        cost = members.empty() ? 0.0 : cost_ce(s, g);
        break;
      case CostKind::ModularCost:
        cost = modular_total;
        break;
    }
    if (!within_budget(cost, budget)) return;
    const double utility = f.value(s);
    if (!have_best || utility > best_utility ||
        (utility == best_utility &&
         std::lexicographical_compare(members.begin(), members.end(), best_members.begin(),
                                      best_members.end()))) {
      have_best = true;
      best_utility = utility;
      best_members = members;
    }
  };

  const auto dfs = [&](auto&& self, std::size_t idx, Currency modular_total) -> void {
    if (idx == eligible.size()) {
      consider(modular_total);
      return;
    }
    const NodeId v = eligible[idx];
    // include, unless the modular lower bound already busts the budget
    const Currency next = modular_total + cm[static_cast<std::size_t>(v)];
    if (within_budget(next, budget)) {
      members.push_back(v);
      self(self, idx + 1, next);
      members.pop_back();
    }
    self(self, idx + 1, modular_total);
  };
  dfs(dfs, 0, 0.0);

  Selection sel(n);
  for (NodeId v : best_members) sel.add(v);
  SolveResult out{std::move(sel)};
  out.utility = best_utility;
  out.feasible = true;
  out.iterations = 0;
  out.spent_c = out.selection.empty() ? 0.0 : cost_c(out.selection, g).total;
  out.spent_cM = cost_cM(out.selection, g);
  return out;
}

}  // namespace ppc
