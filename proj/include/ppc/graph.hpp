#pragma once

#include <algorithm>
#include <initializer_list>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "ppc/errors.hpp"
#include "ppc/types.hpp"

namespace ppc {

// An ordered set of distinct node ids. The order records the insertion
// sequence; membership tests are O(1).
class Selection {
 public:
  explicit Selection(NodeId universe_size)
      : universe_(universe_size), in_(static_cast<std::size_t>(universe_size), 0) {
    if (universe_size < 0) throw ValidationError("selection universe must be non-negative");
  }

  static Selection of(NodeId universe_size, std::initializer_list<NodeId> ids) {
    Selection s(universe_size);
    for (NodeId v : ids) s.add(v);
    return s;
  }

  void add(NodeId v) {
    check_range(v);
    if (in_[static_cast<std::size_t>(v)]) {
      throw ValidationError("duplicate node " + std::to_string(v) + " in selection");
    }
    in_[static_cast<std::size_t>(v)] = 1;
    members_.push_back(v);
  }

  bool contains(NodeId v) const {
    return v >= 0 && v < universe_ && in_[static_cast<std::size_t>(v)] != 0;
  }

  const std::vector<NodeId>& members() const { return members_; }
  std::size_t size() const { return members_.size(); }
  bool empty() const { return members_.empty(); }
  NodeId universe_size() const { return universe_; }

  bool operator==(const Selection& other) const {
    return universe_ == other.universe_ && members_ == other.members_;
  }

 private:
  void check_range(NodeId v) const {
    if (v < 0 || v >= universe_) {
      throw ValidationError("node id " + std::to_string(v) + " out of range [0, " +
                            std::to_string(universe_) + ")");
    }
  }

  NodeId universe_;
  std::vector<char> in_;
  std::vector<NodeId> members_;
};

// Dense table of expected payments E[tau(v, u)] for ordered pairs v != u,
// together with the payment bounds. Values may be asymmetric. Immutable
// after construction.
class PayoffModel {
 public:
  PayoffModel(NodeId n, Currency tau_min, Currency tau_max, std::vector<Currency> expected)
      : n_(n), tau_min_(tau_min), tau_max_(tau_max), table_(std::move(expected)) {
    if (n < 0) throw ValidationError("negative node count");
    if (!(tau_min > 0.0)) throw ValidationError("tau_min must be positive");
    if (tau_max < tau_min) throw ValidationError("tau_max must be >= tau_min");
    if (table_.size() != static_cast<std::size_t>(n) * static_cast<std::size_t>(n)) {
      throw ValidationError("payoff table must have n*n entries");
    }
    for (NodeId v = 0; v < n_; ++v) {
      for (NodeId u = 0; u < n_; ++u) {
        if (v == u) continue;
        if (table_[index(v, u)] > tau_max_) {
          throw ValidationError("payoff(" + std::to_string(v) + "," + std::to_string(u) +
                                ") exceeds tau_max");
        }
      }
    }
  }

  static PayoffModel uniform(NodeId n, Currency value, Currency tau_min, Currency tau_max) {
    return PayoffModel(n, tau_min, tau_max,
                       std::vector<Currency>(static_cast<std::size_t>(n) * n, value));
  }

  NodeId size() const { return n_; }
  Currency tau_min() const { return tau_min_; }
  Currency tau_max() const { return tau_max_; }

  // Expected payment to v when scored against u.
  Currency payoff(NodeId v, NodeId u) const { return table_[index(v, u)]; }

 private:
  std::size_t index(NodeId v, NodeId u) const {
    return static_cast<std::size_t>(v) * static_cast<std::size_t>(n_) +
           static_cast<std::size_t>(u);
  }

  NodeId n_;
  Currency tau_min_;
  Currency tau_max_;
  std::vector<Currency> table_;
};

// Peer graph induced by the minimum-payment threshold: {v,u} is an edge iff
// both directed expected payments clear tau_min. Nodes without peers are
// retained; they simply can never appear in a feasible selection.
class PpcGraph {
 public:
  const PayoffModel& payoffs() const { return payoffs_; }
  NodeId size() const { return payoffs_.size(); }
  Currency tau_min() const { return payoffs_.tau_min(); }
  Currency tau_max() const { return payoffs_.tau_max(); }

  std::span<const NodeId> peers(NodeId v) const {
    return {adjacency_[static_cast<std::size_t>(v)].data(),
            adjacency_[static_cast<std::size_t>(v)].size()};
  }

  int degree(NodeId v) const {
    return static_cast<int>(adjacency_[static_cast<std::size_t>(v)].size());
  }

  bool are_peers(NodeId v, NodeId u) const {
    const auto& nv = adjacency_[static_cast<std::size_t>(v)];
    return std::binary_search(nv.begin(), nv.end(), u);
  }

  int omega() const { return omega_; }
  std::size_t edge_count() const { return edge_count_; }

  friend PpcGraph build_graph(PayoffModel payoffs);

 private:
  explicit PpcGraph(PayoffModel payoffs) : payoffs_(std::move(payoffs)) {}

  PayoffModel payoffs_;
  std::vector<std::vector<NodeId>> adjacency_;
  int omega_ = 0;
  std::size_t edge_count_ = 0;
};

inline PpcGraph build_graph(PayoffModel payoffs) {
  PpcGraph g(std::move(payoffs));
  const NodeId n = g.payoffs_.size();
  const Currency tau_min = g.payoffs_.tau_min();
  g.adjacency_.assign(static_cast<std::size_t>(n), {});
  for (NodeId v = 0; v < n; ++v) {
    for (NodeId u = v + 1; u < n; ++u) {
      if (g.payoffs_.payoff(v, u) >= tau_min && g.payoffs_.payoff(u, v) >= tau_min) {
        g.adjacency_[static_cast<std::size_t>(v)].push_back(u);
        g.adjacency_[static_cast<std::size_t>(u)].push_back(v);
        ++g.edge_count_;
      }
    }
  }
  for (auto& nv : g.adjacency_) {
    g.omega_ = std::max(g.omega_, static_cast<int>(nv.size()));
  }
  return g;
}

// Members of s that have at least one peer inside s.
inline std::vector<NodeId> peered_members(const Selection& s, const PpcGraph& g) {
  std::vector<NodeId> out;
  out.reserve(s.size());
  for (NodeId v : s.members()) {
    for (NodeId u : g.peers(v)) {
      if (s.contains(u)) {
        out.push_back(v);
        break;
      }
    }
  }
  return out;
}

// True iff every selected node can be scored against a selected peer. The
// empty selection is vacuously feasible.
inline bool is_feasible(const Selection& s, const PpcGraph& g) {
  return peered_members(s, g).size() == s.size();
}

}  // namespace ppc
