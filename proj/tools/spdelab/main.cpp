// spdelab: batch runner for the correction-term experiments.
//
//   spdelab lambda   --config scheme.txt [--nu 1] [--tol 1e-10] [--closed-form]
//   spdelab converge --config run.cfg [--eps 0.125,0.0625] [--replicates 32]
//   spdelab chaos    --config scheme.txt [--eps ...] [--samples 200]
//   spdelab qv       [--nu 1] [--K 512] [--M 2048] [--samples 200]
//
// Shared flags: --seed --workers --out --tol --dry-run.

#include <CLI11.hpp>

#include <iostream>

#include "commands.hpp"

namespace {

void add_common(CLI::App* app, spdelab::cli::CommonOptions& c, bool needs_config) {
  auto* config = app->add_option("--config", c.config, "Config file");
  if (needs_config) config->required()->check(CLI::ExistingFile);
  app->add_option("--seed", c.seed, "Base seed (u64)");
  app->add_option("--workers", c.workers, "Worker threads")->check(CLI::PositiveNumber);
  app->add_option("--out", c.out, "Output directory");
  app->add_option("--tol", c.tol, "Quadrature tolerance");
  app->add_flag("--dry-run", c.dry_run, "Validate inputs without computing");
}

}  // namespace

int main(int argc, char** argv) {
  using namespace spdelab::cli;
  CLI::App app{"spdelab: spatial correction-term laboratory"};
  app.set_version_flag("--version", kToolVersion);
  app.require_subcommand(1);

  LambdaOptions lambda;
  auto* lambda_cmd = app.add_subcommand("lambda", "Correction constant of a scheme");
  add_common(lambda_cmd, lambda.common, true);
  lambda_cmd->add_option("--nu", lambda.nu, "Viscosity");
  lambda_cmd->add_flag("--closed-form", lambda.closed_form, "Also print the closed-form oracle");

  ConvergeOptions converge;
  auto* converge_cmd = app.add_subcommand("converge", "Coupled convergence ensemble");
  add_common(converge_cmd, converge.common, true);
  converge_cmd->add_option("--eps", converge.eps, "Discretization scales")->delimiter(',');
  converge_cmd->add_option("--replicates", converge.replicates, "Ensemble size");
  converge_cmd->add_option("--refine", converge.refine, "Halve dt this many times");

  ChaosOptions chaos;
  auto* chaos_cmd = app.add_subcommand("chaos", "Second-chaos identity and distance sweep");
  add_common(chaos_cmd, chaos.common, true);
  chaos_cmd->add_option("--eps", chaos.eps, "Discretization scales")->delimiter(',');
  chaos_cmd->add_option("--samples", chaos.samples, "Samples per eps");
  chaos_cmd->add_option("--nu", chaos.nu, "Viscosity");
  chaos_cmd->add_option("--gamma", chaos.gamma, "Lower band exponent");
  chaos_cmd->add_option("--chi", chaos.chi, "Upper band exponent");
  chaos_cmd->add_option("--alpha", chaos.alpha, "Negative Sobolev index");

  QvOptions qv;
  auto* qv_cmd = app.add_subcommand("qv", "Quadratic variation of the stationary field");
  add_common(qv_cmd, qv.common, false);
  qv_cmd->add_option("--nu", qv.nu, "Viscosity");
  qv_cmd->add_option("--K", qv.max_mode, "Max mode");
  qv_cmd->add_option("--M", qv.grid_size, "Grid points");
  qv_cmd->add_option("--samples", qv.samples, "Samples");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kValidationFailure;
  }

  return run_guarded(
      [&]() -> int {
        if (*lambda_cmd) return cmd_lambda(lambda, std::cout);
        if (*converge_cmd) return cmd_converge(converge, std::cout);
        if (*chaos_cmd) return cmd_chaos(chaos, std::cout);
        return cmd_qv(qv, std::cout);
      },
      std::cerr);
}
