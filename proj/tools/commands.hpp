// Copyright The paro-afem Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef PARO_TOOLS_COMMANDS_HPP
#define PARO_TOOLS_COMMANDS_HPP

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <string>

namespace paro::cli
{

namespace exit_code
{
constexpr int converged = 0;
constexpr int error = 1;
constexpr int max_refinements = 2;
constexpr int verification_failed = 3;
}  // namespace exit_code

struct CommandOptions
{
  std::string config_path;
  std::optional<std::string> output_dir;
  std::optional<std::size_t> threads;
};

// Adaptive run: history.csv, timing.csv, mesh.txt, orbitals.txt in the output directory and
// a "n_refinements,final_dofs,lambda_1,..." summary on out.
int cmd_run(const CommandOptions &options, std::ostream &out, std::ostream &err);

// Adaptive run with a reference eigensolve on every level: verify.csv plus one
// "CHECK <name> PASS|FAIL <detail>" line per check.
int cmd_verify(const CommandOptions &options, std::ostream &out, std::ostream &err);

// Analytic Dirichlet spectrum of the unit square: "k,m,n,lambda" rows.
int cmd_spectrum(std::size_t count, std::ostream &out, std::ostream &err);

}  // namespace paro::cli

#endif  // PARO_TOOLS_COMMANDS_HPP
