// Command-line front end: instance generation, single solves, parameter
// sweeps and the randomized invariant suites.

#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "ppc/ppc.hpp"

namespace {

struct GenerateFlags {
  std::string layout = "mixture";
  ppc::SensingConfig cfg;
  std::string kernel = "paper";
  int benchmark_scale = 1;
  std::optional<double> default_budget;
  CLI::Option* seed_option = nullptr;
};

ppc::Instance build_instance(const GenerateFlags& flags) {
  if (flags.layout == "mixture") {
    ppc::SensingConfig cfg = flags.cfg;
    cfg.kernel = ppc::parse_kernel(flags.kernel);
    ppc::Instance inst = ppc::generate_sensing_instance(cfg);
    if (flags.default_budget) inst.default_budget = *flags.default_budget;
    return inst;
  }
  if (flags.layout == "benchmark") {
    ppc::BenchmarkConfig cfg;  // carries the calibrated default seed
    cfg.scale = flags.benchmark_scale;
    if (flags.seed_option != nullptr && flags.seed_option->count() > 0) {
      cfg.seed = flags.cfg.seed;
    }
    cfg.tau_min = flags.cfg.tau_min;
    cfg.tau_max = flags.cfg.tau_max;
    ppc::Instance inst = ppc::generate_benchmark_instance(cfg);
    if (flags.default_budget) inst.default_budget = *flags.default_budget;
    return inst;
  }
  throw ppc::ValidationError("unknown layout '" + flags.layout + "' (mixture|benchmark)");
}

void add_generate_flags(CLI::App* cmd, GenerateFlags& flags, bool with_seed = true) {
  cmd->add_option("--layout", flags.layout, "instance layout: mixture|benchmark");
  cmd->add_option("--sensors", flags.cfg.num_sensors, "number of sensors (mixture layout)");
  cmd->add_option("--pois", flags.cfg.num_pois, "number of points of interest (mixture layout)");
  cmd->add_option("--area", flags.cfg.area_side, "area side length in meters");
  cmd->add_option("--radius", flags.cfg.range_r, "coverage/correlation range R in meters");
  cmd->add_option("--variogram-a", flags.cfg.variogram_a, "variogram shape parameter");
  cmd->add_option("--perturb", flags.cfg.perturb_sigma, "sensor perturbation sigma in meters");
  cmd->add_option("--tau-min", flags.cfg.tau_min, "minimum expected payment threshold");
  cmd->add_option("--tau-max", flags.cfg.tau_max, "maximum expected payment");
  cmd->add_option("--kernel", flags.kernel, "payoff kernel: paper|decaying");
  if (with_seed) flags.seed_option = cmd->add_option("--seed", flags.cfg.seed, "generation seed");
  cmd->add_option("--clusters", flags.cfg.cluster_count, "sensor mixture components");
  cmd->add_option("--cluster-sigma", flags.cfg.cluster_sigma, "sensor cluster spread in meters");
  cmd->add_option("--scale", flags.benchmark_scale, "benchmark layout scale (1 = 100 sensors)");
  cmd->add_option("--default-budget", flags.default_budget, "budget stored in the instance");
}

void print_summary(const ppc::Instance& inst) {
  const ppc::PpcGraph g = inst.graph();
  std::cout << "nodes: " << g.size() << "\n"
            << "pois: " << inst.pois.size() << "\n"
            << "edges: " << g.edge_count() << "\n"
            << "max_peers: " << g.omega() << "\n"
            << "tau_min: " << ppc::format_decimal(inst.tau_min) << "\n"
            << "tau_max: " << ppc::format_decimal(inst.tau_max) << "\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"budgeted node selection under peer-prediction constraints"};
  app.require_subcommand(1);

  // generate
  GenerateFlags gen;
  std::string gen_out;
  CLI::App* cmd_generate = app.add_subcommand("generate", "write a synthetic instance file");
  add_generate_flags(cmd_generate, gen);
  cmd_generate->add_option("--out", gen_out, "output instance path")->required();

  // solve
  std::string solve_instance;
  std::string solve_method = "ppc_greedy";
  std::string solve_alpha = "bound";
  std::optional<double> solve_budget;
  std::optional<double> solve_tau_min;
  std::uint64_t solve_seed = 1;
  CLI::App* cmd_solve = app.add_subcommand("solve", "run one method on an instance");
  cmd_solve->add_option("--instance", solve_instance, "instance file")->required();
  cmd_solve->add_option("--method", solve_method,
                        "ppc_greedy|ppc_greedy_iter|random|optimistic_greedy|brute_force");
  cmd_solve->add_option("--budget", solve_budget, "budget (defaults to the instance's)");
  cmd_solve->add_option("--tau-min", solve_tau_min, "override the payment threshold");
  cmd_solve->add_option("--alpha", solve_alpha, "slope: bound|exact|VALUE");
  cmd_solve->add_option("--seed", solve_seed, "seed for the random baseline");

  // sweep
  GenerateFlags sweep_gen;
  std::string sweep_instance;
  std::string sweep_out;
  std::string sweep_alpha = "bound";
  ppc::SweepConfig sweep_cfg;
  std::vector<std::string> sweep_methods;
  CLI::App* cmd_sweep = app.add_subcommand("sweep", "budget and threshold sweeps to CSV");
  cmd_sweep->add_option("--instance", sweep_instance,
                        "instance file (otherwise generated from the layout flags)");
  add_generate_flags(cmd_sweep, sweep_gen, /*with_seed=*/false);
  cmd_sweep->add_option("--out", sweep_out, "output CSV path")->required();
  cmd_sweep->add_option("--budgets", sweep_cfg.budgets, "budget grid")->delimiter(',');
  cmd_sweep->add_option("--tau-mins", sweep_cfg.tau_mins, "threshold grid")->delimiter(',');
  cmd_sweep->add_option("--fixed-budget", sweep_cfg.fixed_budget,
                        "budget used for the threshold grid");
  cmd_sweep->add_option("--fixed-tau-min", sweep_cfg.fixed_tau_min,
                        "threshold used for the budget grid");
  cmd_sweep->add_option("--methods", sweep_methods, "methods to run")->delimiter(',');
  cmd_sweep->add_option("--repeats", sweep_cfg.random_repeats, "random baseline repeats");
  cmd_sweep->add_option("--seed", sweep_cfg.base_seed, "base seed for derived streams");
  cmd_sweep->add_option("--alpha", sweep_alpha, "slope: bound|exact|VALUE");

  // verify
  std::string verify_level = "quick";
  std::uint64_t verify_seed = 1;
  CLI::App* cmd_verify = app.add_subcommand("verify", "run the randomized invariant suites");
  cmd_verify->add_option("--level", verify_level, "quick|full");
  cmd_verify->add_option("--seed", verify_seed, "suite seed");

  CLI11_PARSE(app, argc, argv);

  try {
    if (cmd_generate->parsed()) {
      const ppc::Instance inst = build_instance(gen);
      if (inst.clamps_payoffs()) {
        std::cerr << "warning: kernel payoffs above tau_max are clamped to tau_max\n";
      }
      inst.save(gen_out);
      std::cout << "wrote " << gen_out << "\n";
      print_summary(inst);
      return 0;
    }

    if (cmd_solve->parsed()) {
      const ppc::Instance inst = ppc::Instance::load(solve_instance);
      const ppc::Method method = ppc::parse_method(solve_method);
      const ppc::AlphaChoice alpha = ppc::parse_alpha(solve_alpha);
      const double tau = solve_tau_min.value_or(inst.tau_min);
      const double budget = solve_budget.value_or(inst.default_budget.value_or(15.0));
      const ppc::PpcGraph g = inst.graph_at(tau);
      const auto objective = inst.make_objective();
      const ppc::RunRecord rec =
          ppc::run_single(inst, g, *objective, method, budget, tau, alpha, solve_seed);
      std::cout << ppc::csv_header() << "\n" << ppc::csv_row(rec) << "\n";
      return 0;
    }

    if (cmd_sweep->parsed()) {
      sweep_gen.cfg.seed = sweep_cfg.base_seed;  // inline generation follows the sweep seed
      ppc::Instance inst = sweep_instance.empty() ? build_instance(sweep_gen)
                                                  : ppc::Instance::load(sweep_instance);
      sweep_cfg.alpha = ppc::parse_alpha(sweep_alpha);
      if (!sweep_methods.empty()) {
        sweep_cfg.methods.clear();
        for (const std::string& m : sweep_methods) {
          sweep_cfg.methods.push_back(ppc::parse_method(m));
        }
      }
      std::ofstream out(sweep_out, std::ios::binary);
      if (!out) throw ppc::IoError("cannot open '" + sweep_out + "' for writing");
      try {
        ppc::run_sweep(inst, sweep_cfg, &out);
      } catch (const ppc::Error& e) {
        out.flush();
        std::cerr << "error: sweep aborted, partial CSV left at " << sweep_out << ": " << e.what()
                  << "\n";
        return 1;
      }
      std::cout << "wrote " << sweep_out << "\n";
      return 0;
    }

    if (cmd_verify->parsed()) {
      if (verify_level != "quick" && verify_level != "full") {
        throw ppc::ValidationError("level must be quick or full");
      }
      const ppc::VerifyReport report =
          ppc::run_invariant_suites(verify_level == "full", verify_seed, &std::cout);
      return report.all_passed ? 0 : 1;
    }
  } catch (const ppc::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
