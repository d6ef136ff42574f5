#pragma once

#include <algorithm>
#include <cstdint>
#include <string>
#include <vector>

#include "ppc/errors.hpp"
#include "ppc/graph.hpp"
#include "ppc/types.hpp"

namespace ppc {

struct PeerCharge {
  NodeId node;
  NodeId peer;       // the in-selection peer the node is scored against
  Currency payment;  // expected payment for that pairing
};

struct CostBreakdown {
  Currency total = 0.0;
  std::vector<PeerCharge> per_node;
};

// Cheapest expected payment node v can be scored at, over all of its peers.
inline Currency cost_cm(NodeId v, const PpcGraph& g) {
  const auto peers = g.peers(v);
  if (peers.empty()) {
    throw IsolatedNodeError("node " + std::to_string(v) + " has no peers");
  }
  Currency best = g.payoffs().payoff(v, peers[0]);
  for (std::size_t i = 1; i < peers.size(); ++i) {
    best = std::min(best, g.payoffs().payoff(v, peers[i]));
  }
  return best;
}

// Modular lower bound on the selection cost: each member charged its
// cheapest peer anywhere in the graph.
inline Currency cost_cM(const Selection& s, const PpcGraph& g) {
  Currency total = 0.0;
  for (NodeId v : s.members()) total += cost_cm(v, g);
  return total;
}

// True elicitation cost: every member is scored against its best peer
// inside the selection. Defined only on feasible selections.
inline CostBreakdown cost_c(const Selection& s, const PpcGraph& g) {
  CostBreakdown out;
  out.per_node.reserve(s.size());
  for (NodeId v : s.members()) {
    NodeId best_peer = -1;
    Currency best = 0.0;
    for (NodeId u : g.peers(v)) {
      if (!s.contains(u)) continue;
      const Currency p = g.payoffs().payoff(v, u);
      if (best_peer < 0 || p > best) {
        best_peer = u;
        best = p;
      }
    }
    if (best_peer < 0) {
      throw InfeasibleSelectionError("node " + std::to_string(v) +
                                     " has no peer inside the selection");
    }
    out.per_node.push_back({v, best_peer, best});
    out.total += best;
  }
  return out;
}

namespace detail {

// Best in-set payoff of u, or -1 when u has no selected peer.
template <class InSet>
Currency best_in_set(NodeId u, InSet&& in, const PpcGraph& g) {
  Currency best = -1.0;
  for (NodeId p : g.peers(u)) {
    if (in(p)) best = std::max(best, g.payoffs().payoff(u, p));
  }
  return best;
}

// Charge of u under the extended rule: best selected peer when one exists,
// cheapest peer anywhere otherwise.
template <class InSet>
Currency charge(NodeId u, InSet&& in, const PpcGraph& g) {
  const Currency best = best_in_set(u, in, g);
  return best >= 0.0 ? best : cost_cm(u, g);
}

// Marginal of the extended cost for adding v to the set described by `in`
// (which must not contain v). Only v itself and v's selected peers can
// change charge, so the sum is local.
template <class InSet>
Currency marginal_ce_impl(NodeId v, InSet&& in, const PpcGraph& g) {
  Currency m = charge(v, in, g);
  for (NodeId u : g.peers(v)) {
    if (!in(u)) continue;
    const Currency b = best_in_set(u, in, g);
    const Currency before = b >= 0.0 ? b : cost_cm(u, g);
    const Currency after = std::max(b, g.payoffs().payoff(u, v));
    m += after - before;
  }
  return m;
}

}  // namespace detail

// Extension of the true cost to arbitrary selections: members without a
// selected peer are charged as if scored against their worst peer. Agrees
// with cost_c on feasible selections.
inline Currency cost_ce(const Selection& s, const PpcGraph& g) {
  Currency total = 0.0;
  const auto in = [&s](NodeId u) { return s.contains(u); };
  for (NodeId v : s.members()) total += detail::charge(v, in, g);
  return total;
}

// cost_ce(s + v) - cost_ce(s), computed locally.
inline Currency marginal_ce(NodeId v, const Selection& s, const PpcGraph& g) {
  if (s.contains(v)) {
    throw PreconditionError("marginal_ce: node " + std::to_string(v) + " already selected");
  }
  return detail::marginal_ce_impl(v, [&s](NodeId u) { return s.contains(u); }, g);
}

enum class SlopeKind { Exact, UpperBound };

// The slope measures how far the extended cost deviates from modularity:
// 0 means marginals never exceed singleton costs.
struct SlopeEstimate {
  double value = 0.0;
  SlopeKind kind = SlopeKind::UpperBound;
};

inline int default_slope_cap() { return enumeration_cap(15); }

// Closed-form upper bound from the payment bounds and the peer count.
inline SlopeEstimate slope_bound(const PpcGraph& g) {
  if (g.omega() == 0) {
    throw IsolatedNodeError("slope bound undefined on a graph with no edges");
  }
  const double value = 1.0 - g.tau_min() / (static_cast<double>(g.omega()) * g.tau_max());
  return {value, SlopeKind::UpperBound};
}

namespace detail {

inline void require_all_peered(const PpcGraph& g) {
  for (NodeId v = 0; v < g.size(); ++v) {
    if (g.degree(v) == 0) {
      throw IsolatedNodeError("exact slope requires every node to have a peer (node " +
                              std::to_string(v) + " has none)");
    }
  }
}

}  // namespace detail

// Definitional slope: full enumeration of (v, S) pairs. Exponential; capped.
inline SlopeEstimate slope_exact(const PpcGraph& g, int cap = default_slope_cap()) {
  const NodeId n = g.size();
  if (n > cap) {
    throw InstanceTooLargeError("exact slope needs |V| <= " + std::to_string(cap) +
                                ", got " + std::to_string(n));
  }
  detail::require_all_peered(g);
  std::vector<Currency> cm(static_cast<std::size_t>(n));
  for (NodeId v = 0; v < n; ++v) cm[static_cast<std::size_t>(v)] = cost_cm(v, g);

  double min_ratio = 1.0;
  const std::uint64_t total = std::uint64_t{1} << n;
  for (NodeId v = 0; v < n; ++v) {
    for (std::uint64_t mask = 0; mask < total; ++mask) {
      if ((mask >> v) & 1ULL) continue;
      const auto in = [mask](NodeId u) { return (mask >> u) & 1ULL; };
      const Currency m = detail::marginal_ce_impl(v, in, g);
      min_ratio = std::min(min_ratio, cm[static_cast<std::size_t>(v)] / m);
    }
  }
  return {std::max(0.0, 1.0 - min_ratio), SlopeKind::Exact};
}

// Fast path for the exact slope: the marginal of adding v depends only on
// the selected nodes among v's peers and their peers, so it is enough to
// enumerate subsets of that influence set. Must agree with slope_exact.
inline SlopeEstimate slope_exact_restricted(const PpcGraph& g, int per_node_cap = 18) {
  detail::require_all_peered(g);
  const NodeId n = g.size();
  std::vector<char> in_set(static_cast<std::size_t>(n), 0);

  double min_ratio = 1.0;
  std::vector<NodeId> influence;
  for (NodeId v = 0; v < n; ++v) {
    influence.clear();
    for (NodeId u : g.peers(v)) {
      influence.push_back(u);
      for (NodeId w : g.peers(u)) {
        if (w != v) influence.push_back(w);
      }
    }
    std::sort(influence.begin(), influence.end());
    influence.erase(std::unique(influence.begin(), influence.end()), influence.end());
    const int k = static_cast<int>(influence.size());
    if (k > per_node_cap) {
      throw InstanceTooLargeError("influence set of node " + std::to_string(v) +
                                  " exceeds cap " + std::to_string(per_node_cap));
    }
    const Currency cm_v = cost_cm(v, g);
    const std::uint64_t total = std::uint64_t{1} << k;
    for (std::uint64_t mask = 0; mask < total; ++mask) {
      for (int i = 0; i < k; ++i) {
        in_set[static_cast<std::size_t>(influence[static_cast<std::size_t>(i)])] =
            static_cast<char>((mask >> i) & 1ULL);
      }
      const auto in = [&in_set](NodeId u) { return in_set[static_cast<std::size_t>(u)] != 0; };
      const Currency m = detail::marginal_ce_impl(v, in, g);
      min_ratio = std::min(min_ratio, cm_v / m);
    }
    for (NodeId u : influence) in_set[static_cast<std::size_t>(u)] = 0;
  }
  return {std::max(0.0, 1.0 - min_ratio), SlopeKind::Exact};
}

}  // namespace ppc
