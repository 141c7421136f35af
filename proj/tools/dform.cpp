// dform: audit, evolve, and differentiate convex 2-homogeneous energies on
// finite weighted graphs. One command per invocation:
//
//   dform audit  --config experiment.json [--out DIR]
//   dform flow   --config experiment.json [--out DIR]
//   dform slopes --config experiment.json [--out DIR]
//
// Exit codes: 0 success (or expectation met), 1 usage/config error,
// 2 solver failure, 3 expectation mismatch.

#include "ndf/experiment.hpp"

#include "CLI11.hpp"

#include <iostream>

namespace {

struct CommonArgs {
  std::string config_path;
  std::string out_dir = "out";
  std::int64_t seed = -1;
  double tol = -1.0;
  int max_iters = -1;
  bool dump_config = false;
};

void add_common(CLI::App* cmd, CommonArgs& args) {
  cmd->add_option("--config", args.config_path, "experiment configuration file")->required();
  cmd->add_option("--out", args.out_dir, "output directory");
  cmd->add_option("--seed", args.seed, "override the configured seed");
  cmd->add_option("--tol", args.tol, "override the solver stationarity tolerance");
  cmd->add_option("--max-iters", args.max_iters, "override the solver iteration budget");
  cmd->add_flag("--dump-config", args.dump_config,
                "print the normalized configuration and exit");
}

ndf::ExperimentConfig load(const CommonArgs& args) {
  ndf::ExperimentConfig cfg = ndf::ExperimentConfig::load(args.config_path);
  if (args.seed >= 0) cfg.seed = static_cast<std::uint64_t>(args.seed);
  if (args.tol > 0) cfg.solver.tolerance = args.tol;
  if (args.max_iters > 0) cfg.solver.max_iterations = args.max_iters;
  cfg.solver.validate();
  return cfg;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"calculus laboratory for nonlinear Dirichlet energies on finite weighted graphs"};
  app.require_subcommand(1);

  CommonArgs args;
  CLI::App* audit = app.add_subcommand("audit", "run the full inequality audit");
  add_common(audit, args);
  CLI::App* flow = app.add_subcommand("flow", "integrate the gradient flow by implicit Euler");
  add_common(flow, args);
  CLI::App* slopes = app.add_subcommand("slopes", "compute slope enclosures and verdicts");
  add_common(slopes, args);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? ndf::kExitOk : ndf::kExitUsage;
  }

  try {
    const ndf::ExperimentConfig cfg = load(args);
    if (args.dump_config) {
      std::cout << cfg.dump();
      return ndf::kExitOk;
    }
    ndf::RunOutcome outcome;
    if (audit->parsed()) {
      outcome = ndf::run_audit(cfg, args.out_dir, std::cout);
    } else if (flow->parsed()) {
      outcome = ndf::run_flow(cfg, args.out_dir, std::cout);
    } else {
      outcome = ndf::run_slopes(cfg, args.out_dir, std::cout);
    }
    if (!outcome.message.empty()) {
      (outcome.exit_code == ndf::kExitOk ? std::cout : std::cerr) << outcome.message << "\n";
    }
    return outcome.exit_code;
  } catch (const ndf::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return ndf::kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return ndf::kExitSolverFailure;
  }
}
