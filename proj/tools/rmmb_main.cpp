#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "rmmb/cli.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Myerson/VCG revenue monotonicity toolkit for matroid and "
               "downward-closed markets"};
  app.require_subcommand(1);

  rmmb::RunConfig cfg;
  std::string mechanism = "myeropt";

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--format", cfg.format, "output format")
        ->check(CLI::IsMember({"json", "csv"}))
        ->capture_default_str();
    sub->add_option("--out", cfg.out_path, "write output to a file");
  };

  CLI::App* run = app.add_subcommand(
      "run", "evaluate the revenue monotonicity check on a scenario file");
  run->add_option("input", cfg.input_path, "scenario JSON file")->required();
  run->add_option("--trials", cfg.trials, "Monte Carlo trials")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  run->add_option("--seed", cfg.seed, "RNG seed")->capture_default_str();
  run->add_option("--mechanism", mechanism, "mechanism to evaluate")
      ->check(CLI::IsMember({"myeropt", "vcg"}))
      ->capture_default_str();
  add_common(run);

  CLI::App* check = app.add_subcommand(
      "check-matroid", "classify a set-system file and print a witness");
  check->add_option("input", cfg.input_path, "set-system JSON file")
      ->required();
  check->add_option("--out", cfg.out_path, "write output to a file");

  CLI::App* cx = app.add_subcommand(
      "counterexample",
      "construct a revenue monotonicity violation from a non-matroid system");
  cx->add_option("input", cfg.input_path, "set-system JSON file");
  cx->add_option("--n-param", cfg.n_params,
                 "tail parameter N for the ratio experiment (repeatable)");
  cx->add_flag("--vcg", cfg.vcg_witness_only,
               "emit only the VCG non-monotonicity witness");
  cx->add_flag("--drs-table", cfg.drs_table,
               "emit the five-element maximal-set exchange table");
  cx->add_option("--scenario-out", cfg.scenario_out,
                 "path for the generated replay scenario");
  add_common(cx);

  CLI11_PARSE(app, argc, argv);

  cfg.mechanism = rmmb::mechanism_from_name(mechanism);
  if (run->parsed()) return rmmb::cmd_run(cfg, std::cout, std::cerr);
  if (check->parsed()) return rmmb::cmd_check_matroid(cfg, std::cout, std::cerr);
  if (!cfg.drs_table && cfg.input_path.empty()) {
    std::cerr << "error: counterexample needs an input file or --drs-table\n";
    return 2;
  }
  return rmmb::cmd_counterexample(cfg, std::cout, std::cerr);
}
