// SPDX-License-Identifier: Apache-2.0
//
// polygauge: polyhedral gauge regularization toolkit.
//
//   polygauge certify    --in instances.json --out report.json [--tol T]
//   polygauge solve      --in instances.json --out report.json
//                        --method {closed-form|qp|lp0} [--lambda L]
//   polygauge experiment --kind {noise-scaling|support-recovery|negative-ic}
//                        --config config.json --seed S --out-dir DIR
//
// Exit codes: 0 success, 2 per-instance precondition failures recorded,
// 1 hard errors.

#include <string>

#include <CLI11.hpp>

#include "polygauge/cli.hpp"

int main(int argc, char** argv) {
  CLI::App app{"polyhedral gauge regularization toolkit"};
  app.require_subcommand(1);

  // certify
  auto* certify = app.add_subcommand(
      "certify", "face, criterion, constants and dual certificate of x0");
  std::string certify_in, certify_out;
  polygauge::cli::CertifyOptions certify_opts;
  certify->add_option("--in", certify_in, "instance JSON file")->required();
  certify->add_option("--out", certify_out,
                      "report JSON file (stdout when omitted)");
  certify->add_option("--tol", certify_opts.support_tol,
                      "relative face-detection tolerance");
  certify->add_flag("--timings", certify_opts.timings,
                    "include wall-clock timings (breaks byte determinism)");

  // solve
  auto* solve = app.add_subcommand("solve", "run one solver on the instances");
  std::string solve_in, solve_out;
  polygauge::cli::SolveOptions solve_opts;
  double solve_lambda = 0.0;
  bool have_lambda = false;
  solve->add_option("--in", solve_in, "instance JSON file")->required();
  solve->add_option("--out", solve_out,
                    "report JSON file (stdout when omitted)");
  solve
      ->add_option("--method", solve_opts.method,
                   "closed-form | qp | lp0")
      ->check(CLI::IsMember({"closed-form", "qp", "lp0"}));
  auto* lam =
      solve->add_option("--lambda", solve_lambda, "regularization weight");
  solve->add_option("--tol", solve_opts.tol, "solver tolerance");
  solve->add_flag("--timings", solve_opts.timings,
                  "include wall-clock timings (breaks byte determinism)");
  solve->callback([&] { have_lambda = lam->count() > 0; });

  // experiment
  auto* experiment =
      app.add_subcommand("experiment", "seeded experiment families");
  std::string exp_kind, exp_config, exp_outdir = ".";
  std::uint64_t exp_seed = 0;
  experiment
      ->add_option("--kind", exp_kind,
                   "noise-scaling | support-recovery | negative-ic")
      ->required()
      ->check(CLI::IsMember({"noise-scaling", "support-recovery",
                             "negative-ic"}));
  experiment->add_option("--config", exp_config, "experiment config JSON")
      ->required();
  experiment->add_option("--seed", exp_seed, "base seed (64-bit)");
  experiment->add_option("--out-dir", exp_outdir, "output directory");

  CLI11_PARSE(app, argc, argv);

  if (certify->parsed())
    return polygauge::cli::cmd_certify(certify_in, certify_out, certify_opts);
  if (solve->parsed()) {
    if (have_lambda) solve_opts.lambda = solve_lambda;
    return polygauge::cli::cmd_solve(solve_in, solve_out, solve_opts);
  }
  if (experiment->parsed())
    return polygauge::cli::cmd_experiment(exp_kind, exp_config, exp_seed,
                                          exp_outdir);
  return 1;
}
