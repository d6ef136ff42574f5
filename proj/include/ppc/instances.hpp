#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "ppc/errors.hpp"
#include "ppc/graph.hpp"
#include "ppc/objectives.hpp"
#include "ppc/rng.hpp"
#include "ppc/types.hpp"

namespace ppc {

// Two readings of the output-agreement expectation against spatial distance.
// PaperVerbatim grows with distance; Decaying is its complement and decays
// with distance, so that nearby (strongly correlated) sensors expect the
// larger payments. Trend validation uses the decaying form.
enum class PayoffKernel { PaperVerbatim, Decaying };

inline std::string to_string(PayoffKernel k) {
  return k == PayoffKernel::PaperVerbatim ? "paper" : "decaying";
}

inline PayoffKernel parse_kernel(const std::string& s) {
  if (s == "paper") return PayoffKernel::PaperVerbatim;
  if (s == "decaying") return PayoffKernel::Decaying;
  throw ValidationError("unknown kernel '" + s + "' (expected paper|decaying)");
}

struct SensingConfig {
  int num_pois = 30;
  int num_sensors = 100;
  double area_side = 3000.0;
  double range_r = 236.0;
  double variogram_a = 1.0 / 3.0;
  double perturb_sigma = 50.0;
  Currency tau_min = 0.5;
  Currency tau_max = 1.0;
  PayoffKernel kernel = PayoffKernel::PaperVerbatim;
  std::uint64_t seed = 1;
  // Synthetic stand-in for a population likelihood: sensors are drawn from a
  // mixture of Gaussian clusters whose centers are seeded uniformly.
  int cluster_count = 8;
  double cluster_sigma = 250.0;

  void validate() const {
    if (num_pois < 1) throw ValidationError("num_pois must be >= 1");
    if (num_sensors < 1) throw ValidationError("num_sensors must be >= 1");
    if (!(area_side > 0.0)) throw ValidationError("area_side must be positive");
    if (!(range_r > 0.0)) throw ValidationError("range_r must be positive");
    if (!(variogram_a > 0.0)) throw ValidationError("variogram_a must be positive");
    if (perturb_sigma < 0.0) throw ValidationError("perturb_sigma must be non-negative");
    if (!(tau_min > 0.0)) throw ValidationError("tau_min must be positive");
    if (tau_max < tau_min) throw ValidationError("tau_max must be >= tau_min");
    if (cluster_count < 1) throw ValidationError("cluster_count must be >= 1");
  }
};

inline Currency oa_expected_payoff(const Point& a, const Point& b, const SensingConfig& cfg) {
  const double scale = cfg.variogram_a * cfg.range_r * cfg.range_r;
  const double decayed = std::exp(-squared_distance(a, b) / scale);
  return cfg.kernel == PayoffKernel::Decaying ? decayed : 1.0 - decayed;
}

// A self-contained problem instance; the unit of (de)serialization. Payoffs
// are either derived from sensor geometry through a kernel descriptor or
// stored as an explicit dense matrix.
struct Instance {
  std::string objective = "coverage";  // coverage | cardinality
  int num_nodes = 0;
  std::vector<Point> sensors;
  std::vector<Point> pois;
  double range_r = 236.0;
  double variogram_a = 1.0 / 3.0;
  PayoffKernel kernel = PayoffKernel::Decaying;
  bool kernel_payoffs = true;
  std::vector<Currency> payoff_matrix;  // row-major, only when !kernel_payoffs
  Currency tau_min = 0.5;
  Currency tau_max = 1.0;
  std::optional<Currency> default_budget;

  // Kernel values above tau_max are clamped to it so the payment bound stays
  // meaningful on user-supplied tau_max.
  bool clamps_payoffs() const {
    if (!kernel_payoffs) return false;
    SensingConfig k;
    k.range_r = range_r;
    k.variogram_a = variogram_a;
    k.kernel = kernel;
    for (std::size_t v = 0; v < sensors.size(); ++v) {
      for (std::size_t u = v + 1; u < sensors.size(); ++u) {
        if (oa_expected_payoff(sensors[v], sensors[u], k) > tau_max) return true;
      }
    }
    return false;
  }

  PayoffModel payoff_model_at(Currency tau_min_override) const {
    if (tau_min_override > tau_max) {
      throw ValidationError("tau_min above the instance's tau_max");
    }
    const std::size_t n = static_cast<std::size_t>(num_nodes);
    std::vector<Currency> table;
    if (kernel_payoffs) {
      SensingConfig k;
      k.range_r = range_r;
      k.variogram_a = variogram_a;
      k.kernel = kernel;
      table.assign(n * n, 0.0);
      for (std::size_t v = 0; v < n; ++v) {
        for (std::size_t u = 0; u < n; ++u) {
          if (v == u) continue;
          table[v * n + u] =
              std::min(tau_max, oa_expected_payoff(sensors[v], sensors[u], k));
        }
      }
    } else {
      table = payoff_matrix;
    }
    return PayoffModel(num_nodes, tau_min_override, tau_max, std::move(table));
  }

  PayoffModel payoff_model() const { return payoff_model_at(tau_min); }
  PpcGraph graph() const { return build_graph(payoff_model()); }
  PpcGraph graph_at(Currency tmin) const { return build_graph(payoff_model_at(tmin)); }

  std::unique_ptr<Objective> make_objective() const {
    if (objective == "coverage") {
      return std::make_unique<CoverageObjective>(pois, sensors, range_r);
    }
    if (objective == "cardinality") {
      return std::make_unique<CardinalityObjective>(num_nodes);
    }
    throw ValidationError("unknown objective '" + objective + "'");
  }

  std::string to_json() const {
    nlohmann::json j;
    j["schema"] = "ppc-instance-v1";
    j["objective"] = objective;
    j["num_nodes"] = num_nodes;
    j["tau_min"] = tau_min;
    j["tau_max"] = tau_max;
    if (!sensors.empty()) {
      nlohmann::json arr = nlohmann::json::array();
      for (std::size_t i = 0; i < sensors.size(); ++i) {
        arr.push_back({{"id", i}, {"x", sensors[i].x}, {"y", sensors[i].y}});
      }
      j["sensors"] = std::move(arr);
    }
    if (!pois.empty()) {
      nlohmann::json arr = nlohmann::json::array();
      for (const Point& p : pois) arr.push_back({{"x", p.x}, {"y", p.y}});
      j["pois"] = std::move(arr);
    }
    if (kernel_payoffs) {
      j["kernel"] = to_string(kernel);
      j["range_r"] = range_r;
      j["variogram_a"] = variogram_a;
    } else {
      j["payoff_matrix"] = payoff_matrix;
      if (objective == "coverage") {
        j["range_r"] = range_r;
      }
    }
    if (default_budget) j["default_budget"] = *default_budget;
    return j.dump(2) + "\n";
  }

  static Instance from_json(const std::string& text) {
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
      throw IoError(std::string("instance parse failed: ") + e.what());
    }
    try {
      Instance inst;
      inst.objective = j.at("objective").get<std::string>();
      inst.num_nodes = j.at("num_nodes").get<int>();
      inst.tau_min = j.at("tau_min").get<Currency>();
      inst.tau_max = j.at("tau_max").get<Currency>();
      if (j.contains("sensors")) {
        for (const auto& s : j.at("sensors")) {
          inst.sensors.push_back({s.at("x").get<double>(), s.at("y").get<double>()});
        }
      }
      if (j.contains("pois")) {
        for (const auto& p : j.at("pois")) {
          inst.pois.push_back({p.at("x").get<double>(), p.at("y").get<double>()});
        }
      }
      if (j.contains("payoff_matrix")) {
        inst.kernel_payoffs = false;
        inst.payoff_matrix = j.at("payoff_matrix").get<std::vector<Currency>>();
        if (j.contains("range_r")) inst.range_r = j.at("range_r").get<double>();
      } else {
        inst.kernel_payoffs = true;
        inst.kernel = parse_kernel(j.at("kernel").get<std::string>());
        inst.range_r = j.at("range_r").get<double>();
        inst.variogram_a = j.at("variogram_a").get<double>();
      }
      if (j.contains("default_budget")) {
        inst.default_budget = j.at("default_budget").get<Currency>();
      }
      inst.validate();
      return inst;
    } catch (const nlohmann::json::exception& e) {
      throw IoError(std::string("malformed instance: ") + e.what());
    }
  }

  void validate() const {
    if (num_nodes < 1) throw ValidationError("instance needs at least one node");
    if (objective != "coverage" && objective != "cardinality") {
      throw ValidationError("unknown objective '" + objective + "'");
    }
    if (objective == "coverage") {
      if (static_cast<int>(sensors.size()) != num_nodes) {
        throw ValidationError("coverage instance needs one position per node");
      }
      if (!(range_r > 0.0)) throw ValidationError("range_r must be positive");
    }
    if (!kernel_payoffs &&
        payoff_matrix.size() !=
            static_cast<std::size_t>(num_nodes) * static_cast<std::size_t>(num_nodes)) {
      throw ValidationError("payoff matrix must have num_nodes^2 entries");
    }
    if (kernel_payoffs && static_cast<int>(sensors.size()) != num_nodes) {
      throw ValidationError("kernel payoffs need sensor positions");
    }
    if (!(tau_min > 0.0) || tau_max < tau_min) {
      throw ValidationError("invalid payment bounds");
    }
  }

  void save(const std::string& path) const {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open '" + path + "' for writing");
    out << to_json();
    if (!out) throw IoError("write failed for '" + path + "'");
  }

  static Instance load(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return from_json(buf.str());
  }
};

// Synthetic crowd-sensing instance: POIs uniform over the area, sensors from
// the cluster mixture, then perturbed.
inline Instance generate_sensing_instance(const SensingConfig& cfg) {
  cfg.validate();
  Rng rng(cfg.seed);
  const auto clip = [&cfg](Point p) {
    p.x = std::clamp(p.x, 0.0, cfg.area_side);
    p.y = std::clamp(p.y, 0.0, cfg.area_side);
    return p;
  };

  std::vector<Point> centers(static_cast<std::size_t>(cfg.cluster_count));
  for (Point& c : centers) {
    c = {rng.uniform(0.0, cfg.area_side), rng.uniform(0.0, cfg.area_side)};
  }

  Instance inst;
  inst.objective = "coverage";
  inst.num_nodes = cfg.num_sensors;
  inst.range_r = cfg.range_r;
  inst.variogram_a = cfg.variogram_a;
  inst.kernel = cfg.kernel;
  inst.kernel_payoffs = true;
  inst.tau_min = cfg.tau_min;
  inst.tau_max = cfg.tau_max;

  inst.pois.reserve(static_cast<std::size_t>(cfg.num_pois));
  for (int i = 0; i < cfg.num_pois; ++i) {
    inst.pois.push_back({rng.uniform(0.0, cfg.area_side), rng.uniform(0.0, cfg.area_side)});
  }

  inst.sensors.reserve(static_cast<std::size_t>(cfg.num_sensors));
  for (int i = 0; i < cfg.num_sensors; ++i) {
    const Point& c = centers[rng.uniform_index(centers.size())];
    Point p = clip({rng.normal(c.x, cfg.cluster_sigma), rng.normal(c.y, cfg.cluster_sigma)});
    p = clip({rng.normal(p.x, cfg.perturb_sigma), rng.normal(p.y, cfg.perturb_sigma)});
    inst.sensors.push_back(p);
  }
  return inst;
}

// Structured benchmark: coverage sites whose connecting pairs activate at
// different payment thresholds. Site pods are isolated pairs (peer count 1
// everywhere), so the threshold sweep cleanly switches coverage tiers on and
// off while decoy pods feed the random baseline. Scale 1 is the desk size
// (100 sensors / 30 POIs); scale 10 matches the full evaluation size.
struct BenchmarkConfig {
  int scale = 1;
  std::uint64_t seed = 5;
  Currency tau_min = 0.5;
  Currency tau_max = 1.0;
  double perturb_sigma = 3.5;
};

namespace detail {

inline void emit_pod(std::vector<Point>& sensors, Point center, double angle, double gap,
                     double perturb, Rng& rng) {
  const Point axis{std::cos(angle), std::sin(angle)};
  for (const double sign : {-0.5, 0.5}) {
    Point p{center.x + sign * gap * axis.x, center.y + sign * gap * axis.y};
    p.x += rng.normal(0.0, perturb);
    p.y += rng.normal(0.0, perturb);
    sensors.push_back(p);
  }
}

inline Point clamped_offset(Point base, double dx, double dy, double max_radius) {
  const double r = std::sqrt(dx * dx + dy * dy);
  if (r > max_radius) {
    dx *= max_radius / r;
    dy *= max_radius / r;
  }
  return {base.x + dx, base.y + dy};
}

}  // namespace detail

inline Instance generate_benchmark_instance(const BenchmarkConfig& cfg) {
  if (cfg.scale < 1) throw ValidationError("benchmark scale must be >= 1");
  if (!(cfg.tau_min > 0.0) || cfg.tau_max < cfg.tau_min) {
    throw ValidationError("invalid payment bounds");
  }
  const int s = cfg.scale;
  const double cell = 400.0;
  const int blobs = 5 * s;
  const int decoy_pods = 38 * s;
  const int singles = 6 * s;

  // Grid side: blob sites sit on a stride-3 subgrid and own a 3x3 block;
  // decoys and singles take the remaining cells.
  int m = 10;
  while (true) {
    const int sites = ((m - 2) / 3 + 1) * ((m - 2) / 3 + 1);
    const int free_cells = m * m - 9 * blobs;
    if (sites >= blobs && free_cells >= decoy_pods + singles) break;
    ++m;
  }

  Rng rng(cfg.seed);
  const double golden = 2.399963229728653;
  const double cheap_gap = 193.0;  // pair spacing that prices the site near the threshold floor
  const std::array<double, 4> tier_gaps{145.0, 95.0, 58.0, 25.0};

  std::vector<std::pair<int, int>> blob_cells;
  for (int i = 1; i + 1 < m && static_cast<int>(blob_cells.size()) < blobs; i += 3) {
    for (int j = 1; j + 1 < m && static_cast<int>(blob_cells.size()) < blobs; j += 3) {
      blob_cells.push_back({i, j});
    }
  }
  std::vector<char> owned(static_cast<std::size_t>(m) * m, 0);
  for (const auto& [i, j] : blob_cells) {
    for (int di = -1; di <= 1; ++di) {
      for (int dj = -1; dj <= 1; ++dj) {
        owned[static_cast<std::size_t>((i + di) * m + (j + dj))] = 1;
      }
    }
  }

  Instance inst;
  inst.objective = "coverage";
  inst.range_r = 236.0;
  inst.variogram_a = 1.0 / 3.0;
  inst.kernel = PayoffKernel::Decaying;
  inst.kernel_payoffs = true;
  inst.tau_min = cfg.tau_min;
  inst.tau_max = cfg.tau_max;
  inst.default_budget = 15.0;

  const auto cell_center = [&](int i, int j) {
    return Point{(i + 0.5) * cell, (j + 0.5) * cell};
  };

  for (int b = 0; b < blobs; ++b) {
    const auto [ci, cj] = blob_cells[static_cast<std::size_t>(b)];
    Point c = cell_center(ci, cj);
    c.x += rng.uniform(-20.0, 20.0);
    c.y += rng.uniform(-20.0, 20.0);
    const double theta = golden * (b + 1);
    const Point u{std::cos(theta), std::sin(theta)};
    const int tier = b % 5;  // 0: threshold-floor pair only; 1..4: extra tier pair

    if (tier == 0) {
      for (int p = 0; p < 6; ++p) {
        // draws hoisted: argument evaluation order is unspecified
        const double dx = rng.normal(0.0, 25.0);
        const double dy = rng.normal(0.0, 25.0);
        inst.pois.push_back(detail::clamped_offset(c, dx, dy, 70.0));
      }
      detail::emit_pod(inst.sensors, c, theta, cheap_gap, cfg.perturb_sigma, rng);
    } else {
      const Point mid{c.x + 75.0 * u.x, c.y + 75.0 * u.y};
      for (int p = 0; p < 6; ++p) {
        const double dx = rng.normal(0.0, 12.0);
        const double dy = rng.normal(0.0, 12.0);
        inst.pois.push_back(detail::clamped_offset(mid, dx, dy, 30.0));
      }
      detail::emit_pod(inst.sensors, c, theta + 1.5707963267948966,
                       tier_gaps[static_cast<std::size_t>(tier - 1)], cfg.perturb_sigma, rng);
      const Point cheap_center{c.x + 340.0 * u.x, c.y + 340.0 * u.y};
      detail::emit_pod(inst.sensors, cheap_center, theta, cheap_gap, cfg.perturb_sigma, rng);
    }
  }

  int emitted_decoys = 0;
  int emitted_singles = 0;
  for (int i = 0; i < m && emitted_singles < singles; ++i) {
    for (int j = 0; j < m && emitted_singles < singles; ++j) {
      if (owned[static_cast<std::size_t>(i * m + j)]) continue;
      Point c = cell_center(i, j);
      c.x += rng.uniform(-20.0, 20.0);
      c.y += rng.uniform(-20.0, 20.0);
      if (emitted_decoys < decoy_pods) {
        const double gap = (emitted_decoys % 2 == 0) ? 25.0 : 95.0;
        detail::emit_pod(inst.sensors, c, golden * (7 + emitted_decoys), gap, cfg.perturb_sigma,
                         rng);
        ++emitted_decoys;
      } else {
        Point p = c;
        p.x += rng.normal(0.0, cfg.perturb_sigma);
        p.y += rng.normal(0.0, cfg.perturb_sigma);
        inst.sensors.push_back(p);
        ++emitted_singles;
      }
    }
  }
  inst.num_nodes = static_cast<int>(inst.sensors.size());
  return inst;
}

struct CliqueReduction {
  Instance instance;
  Currency budget = 0.0;
};

// Payment table that prices non-edges of a base graph out of any budget:
// within budget n * tau_min, exactly the cliques of the base graph (plus the
// empty set) survive as affordable feasible selections, under a cardinality
// objective and a fully connected peer graph.
inline CliqueReduction build_clique_reduction(int n,
                                              const std::vector<std::pair<NodeId, NodeId>>& edges,
                                              Currency tau_min, Currency tau_max) {
  if (n < 1) throw ValidationError("base graph needs at least one node");
  if (!(tau_min > 0.0)) throw ValidationError("tau_min must be positive");
  const Currency budget = static_cast<Currency>(n) * tau_min;
  if (!(tau_max > budget)) {
    throw PreconditionError("tau_max must exceed n * tau_min for the reduction to price out "
                            "non-edges");
  }

  const std::size_t nn = static_cast<std::size_t>(n);
  std::vector<Currency> table(nn * nn, tau_max);
  for (std::size_t v = 0; v < nn; ++v) table[v * nn + v] = 0.0;
  for (const auto& [a, b] : edges) {
    if (a < 0 || b < 0 || a >= n || b >= n || a == b) {
      throw ValidationError("bad edge in base graph");
    }
    table[static_cast<std::size_t>(a) * nn + static_cast<std::size_t>(b)] = tau_min;
    table[static_cast<std::size_t>(b) * nn + static_cast<std::size_t>(a)] = tau_min;
  }

  CliqueReduction out;
  out.budget = budget;
  out.instance.objective = "cardinality";
  out.instance.num_nodes = n;
  out.instance.kernel_payoffs = false;
  out.instance.payoff_matrix = std::move(table);
  out.instance.tau_min = tau_min;
  out.instance.tau_max = tau_max;
  out.instance.default_budget = budget;
  return out;
}

}  // namespace ppc
