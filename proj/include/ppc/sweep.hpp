#pragma once

#include <algorithm>
#include <bit>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <optional>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include "ppc/costs.hpp"
#include "ppc/errors.hpp"
#include "ppc/graph.hpp"
#include "ppc/instances.hpp"
#include "ppc/objectives.hpp"
#include "ppc/rng.hpp"
#include "ppc/solvers.hpp"

namespace ppc {

enum class Method { PpcGreedy, PpcGreedyIter, Random, OptimisticGreedy, BruteForce };

inline std::string to_string(Method m) {
  switch (m) {
    case Method::PpcGreedy: return "ppc_greedy";
    case Method::PpcGreedyIter: return "ppc_greedy_iter";
    case Method::Random: return "random";
    case Method::OptimisticGreedy: return "optimistic_greedy";
    case Method::BruteForce: return "brute_force";
  }
  return "?";
}

inline Method parse_method(const std::string& s) {
  if (s == "ppc_greedy") return Method::PpcGreedy;
  if (s == "ppc_greedy_iter") return Method::PpcGreedyIter;
  if (s == "random") return Method::Random;
  if (s == "optimistic_greedy") return Method::OptimisticGreedy;
  if (s == "brute_force") return Method::BruteForce;
  throw ValidationError("unknown method '" + s + "'");
}

enum class AlphaMode { Bound, Exact, Value };

struct AlphaChoice {
  AlphaMode mode = AlphaMode::Bound;
  double value = 0.0;
};

inline AlphaChoice parse_alpha(const std::string& s) {
  if (s == "bound") return {AlphaMode::Bound, 0.0};
  if (s == "exact") return {AlphaMode::Exact, 0.0};
  try {
    std::size_t pos = 0;
    const double v = std::stod(s, &pos);
    if (pos == s.size()) return {AlphaMode::Value, v};
  } catch (...) {
  }
  throw ValidationError("alpha must be 'bound', 'exact' or a number, got '" + s + "'");
}

// On a graph with no edges every solver returns the empty selection, so any
// slope works; the closed-form bound needs at least one peer pair.
inline SlopeEstimate resolve_alpha(const AlphaChoice& choice, const PpcGraph& g) {
  switch (choice.mode) {
    case AlphaMode::Bound:
      if (g.edge_count() == 0) return {0.0, SlopeKind::UpperBound};
      return slope_bound(g);
    case AlphaMode::Exact:
      return slope_exact(g);
    case AlphaMode::Value:
      if (choice.value < 0.0 || choice.value >= 1.0) {
        throw InvalidAlphaError("alpha value must lie in [0, 1)");
      }
      return {choice.value, SlopeKind::UpperBound};
  }
  return {0.0, SlopeKind::UpperBound};
}

struct RunRecord {
  std::string method;
  Currency budget = 0.0;
  Currency tau_min = 0.0;
  std::string kernel;
  std::uint64_t seed = 0;
  double utility = 0.0;
  Currency spent_c = 0.0;
  Currency spent_cM = 0.0;
  double num_selected = 0.0;
  std::optional<double> guarantee_factor;
  std::int64_t runtime_ms = 0;
};

inline std::string csv_header() {
  return "method,budget,tau_min,kernel,seed,utility,spent_c,spent_cM,num_selected,"
         "guarantee_factor,runtime_ms";
}

// Decimal with at most six fractional digits, trailing zeros trimmed.
inline std::string format_decimal(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6f", v);
  std::string s(buf);
  while (!s.empty() && s.back() == '0') s.pop_back();
  if (!s.empty() && s.back() == '.') s.pop_back();
  if (s == "-0") s = "0";
  return s;
}

inline std::string csv_quote(const std::string& field) {
  if (field.find_first_of(",\"\n\r") == std::string::npos) return field;
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

inline std::string csv_row(const RunRecord& r) {
  std::string out = csv_quote(r.method);
  out += ',';
  out += format_decimal(r.budget);
  out += ',';
  out += format_decimal(r.tau_min);
  out += ',';
  out += csv_quote(r.kernel);
  out += ',';
  out += std::to_string(r.seed);
  out += ',';
  out += format_decimal(r.utility);
  out += ',';
  out += format_decimal(r.spent_c);
  out += ',';
  out += format_decimal(r.spent_cM);
  out += ',';
  out += format_decimal(r.num_selected);
  out += ',';
  if (r.guarantee_factor) out += format_decimal(*r.guarantee_factor);
  out += ',';
  out += std::to_string(r.runtime_ms);
  return out;
}

inline std::string instance_kernel_label(const Instance& inst) {
  return inst.kernel_payoffs ? to_string(inst.kernel) : "matrix";
}

inline RunRecord run_single(const Instance& inst, const PpcGraph& g, const Objective& f,
                            Method method, Currency budget, Currency tau_used,
                            const AlphaChoice& alpha_choice, std::uint64_t seed) {
  RunRecord rec;
  rec.method = to_string(method);
  rec.budget = budget;
  rec.tau_min = tau_used;
  rec.kernel = instance_kernel_label(inst);
  rec.seed = seed;

  const auto start = std::chrono::steady_clock::now();
  SolveResult res = [&]() {
    switch (method) {
      case Method::PpcGreedy:
        return ppc_greedy(f, g, budget, resolve_alpha(alpha_choice, g));
      case Method::PpcGreedyIter:
        return ppc_greedy_iter(f, g, budget, resolve_alpha(alpha_choice, g));
      case Method::Random:
        return random_baseline(f, g, budget, seed);
      case Method::OptimisticGreedy:
        return optimistic_greedy(f, g, budget);
      case Method::BruteForce:
        return brute_force_opt(f, g, budget, CostKind::TrueCost);
    }
    throw Error("unreachable");
  }();
  const auto stop = std::chrono::steady_clock::now();

  rec.utility = res.utility;
  rec.spent_c = res.spent_c;
  rec.spent_cM = res.spent_cM;
  rec.num_selected = static_cast<double>(res.selection.size());
  if (res.guarantee) rec.guarantee_factor = res.guarantee->factor;
  rec.runtime_ms =
      std::chrono::duration_cast<std::chrono::milliseconds>(stop - start).count();
  return rec;
}

struct SweepConfig {
  std::vector<Currency> budgets{5, 10, 15, 20, 25};
  std::vector<Currency> tau_mins{0.1, 0.25, 0.5, 0.75, 0.9};
  Currency fixed_budget = 15.0;
  Currency fixed_tau_min = 0.5;
  std::vector<Method> methods{Method::PpcGreedy, Method::PpcGreedyIter, Method::Random,
                              Method::OptimisticGreedy};
  int random_repeats = 10;
  std::uint64_t base_seed = 1;
  AlphaChoice alpha{};

  void validate() const {
    if (budgets.empty() || tau_mins.empty()) {
      throw ValidationError("sweep needs at least one budget and one tau_min");
    }
    for (Currency b : budgets) {
      if (!(b > 0.0)) throw ValidationError("budgets must be positive");
    }
    for (Currency t : tau_mins) {
      if (!(t > 0.0)) throw ValidationError("tau_min values must be positive");
    }
    if (random_repeats < 1) throw ValidationError("random_repeats must be >= 1");
  }
};

// Runs the two parameter grids (budget at the fixed threshold, threshold at
// the fixed budget) over all configured methods. The peer graph is rebuilt
// per threshold on the fixed payoff geometry. Rows stream to `csv_out` as
// they are produced so aborted sweeps leave a useful partial file.
inline std::vector<RunRecord> run_sweep(const Instance& inst, const SweepConfig& cfg,
                                        std::ostream* csv_out = nullptr) {
  cfg.validate();
  std::vector<std::pair<Currency, Currency>> grid;  // (tau_min, budget)
  for (Currency b : cfg.budgets) grid.push_back({cfg.fixed_tau_min, b});
  for (Currency t : cfg.tau_mins) grid.push_back({t, cfg.fixed_budget});
  std::sort(grid.begin(), grid.end());
  grid.erase(std::unique(grid.begin(), grid.end()), grid.end());

  if (csv_out) *csv_out << csv_header() << "\n" << std::flush;
  std::vector<RunRecord> records;
  const auto emit = [&](RunRecord rec) {
    if (csv_out) *csv_out << csv_row(rec) << "\n" << std::flush;
    records.push_back(std::move(rec));
  };

  const auto objective = inst.make_objective();
  for (const auto& [tau, budget] : grid) {
    const PpcGraph g = inst.graph_at(tau);
    for (Method method : cfg.methods) {
      if (method == Method::Random) {
        std::vector<RunRecord> repeats;
        for (int rep = 0; rep < cfg.random_repeats; ++rep) {
          const std::uint64_t seed =
              derive_seed(cfg.base_seed,
                          {static_cast<std::uint64_t>(method), std::bit_cast<std::uint64_t>(budget),
                           std::bit_cast<std::uint64_t>(tau), static_cast<std::uint64_t>(rep)});
          RunRecord rec = run_single(inst, g, *objective, method, budget, tau, cfg.alpha, seed);
          repeats.push_back(rec);
          emit(std::move(rec));
        }
        const double n = static_cast<double>(repeats.size());
        RunRecord mean;
        mean.method = "random_mean";
        mean.budget = budget;
        mean.tau_min = tau;
        mean.kernel = instance_kernel_label(inst);
        mean.seed = static_cast<std::uint64_t>(repeats.size());
        std::int64_t total_ms = 0;
        for (const RunRecord& r : repeats) {
          mean.utility += r.utility / n;
          mean.spent_c += r.spent_c / n;
          mean.spent_cM += r.spent_cM / n;
          mean.num_selected += r.num_selected / n;
          total_ms += r.runtime_ms;
        }
        mean.runtime_ms = total_ms / repeats.size();
        RunRecord dev = mean;
        dev.method = "random_stddev";
        dev.utility = dev.spent_c = dev.spent_cM = dev.num_selected = 0.0;
        for (const RunRecord& r : repeats) {
          dev.utility += (r.utility - mean.utility) * (r.utility - mean.utility) / n;
          dev.spent_c += (r.spent_c - mean.spent_c) * (r.spent_c - mean.spent_c) / n;
          dev.spent_cM += (r.spent_cM - mean.spent_cM) * (r.spent_cM - mean.spent_cM) / n;
          dev.num_selected +=
              (r.num_selected - mean.num_selected) * (r.num_selected - mean.num_selected) / n;
        }
        dev.utility = std::sqrt(dev.utility);
        dev.spent_c = std::sqrt(dev.spent_c);
        dev.spent_cM = std::sqrt(dev.spent_cM);
        dev.num_selected = std::sqrt(dev.num_selected);
        emit(std::move(mean));
        emit(std::move(dev));
      } else {
        emit(run_single(inst, g, *objective, method, budget, tau, cfg.alpha, 0));
      }
    }
  }
  return records;
}

}  // namespace ppc
