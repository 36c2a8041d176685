// Copyright The paro-afem Authors
// SPDX-License-Identifier: Apache-2.0

#include <iostream>
#include <CLI11.hpp>
#include "commands.hpp"

int main(int argc, char **argv)
{
  using namespace paro::cli;

  CLI::App app{"Adaptive finite-element eigensolver with parallel orbital updates"};
  app.require_subcommand(1);

  CommandOptions run_opts, verify_opts;
  std::size_t count = 6;

  auto add_common = [&](CLI::App *sub, CommandOptions &opts)
  {
    sub->add_option("--config", opts.config_path, "Flat key = value run configuration")
      ->required();
    sub->add_option_function<std::string>(
      "--out", [&opts](const std::string &v) { opts.output_dir = v; },
      "Output directory (overrides output_dir)");
    sub->add_option_function<std::size_t>(
      "--threads", [&opts](const std::size_t &v) { opts.threads = v; },
      "Worker threads, 0 = all cores (overrides threads)");
  };

  CLI::App *run = app.add_subcommand("run", "Adaptive solve, writes history and final state");
  add_common(run, run_opts);
  CLI::App *verify =
    app.add_subcommand("verify", "Adaptive solve checked against reference solves");
  add_common(verify, verify_opts);
  CLI::App *spectrum = app.add_subcommand("spectrum", "Analytic unit-square Dirichlet spectrum");
  spectrum->add_option("--count", count, "Number of eigenvalues")->check(CLI::PositiveNumber);

  try
  {
    app.parse(argc, argv);
  }
  catch (const CLI::ParseError &e)
  {
    const int code = app.exit(e);
    return code == 0 ? 0 : exit_code::error;
  }

  if (run->parsed())
  {
    return cmd_run(run_opts, std::cout, std::cerr);
  }
  if (verify->parsed())
  {
    return cmd_verify(verify_opts, std::cout, std::cerr);
  }
  return cmd_spectrum(count, std::cout, std::cerr);
}
