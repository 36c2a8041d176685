// Copyright The paro-afem Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef PARO_TOOLS_RUN_CONFIG_HPP
#define PARO_TOOLS_RUN_CONFIG_HPP

#include <cstdint>
#include <iosfwd>
#include <string>
#include "paro/adapt.hpp"
#include "paro/assembly.hpp"
#include "paro/mesh.hpp"

namespace paro::cli
{

enum class SeedKind
{
  LowMode,
  Reference,
  Random
};

// Everything a run needs, as read from a flat "key = value" file.
struct RunConfig
{
  std::string domain = "unit_square";
  int initial_refinements = 4;
  std::string coefficients = "laplace";  // laplace | constant
  Mat2 diffusion = Mat2::identity();     // Used when coefficients = constant.
  double reaction = 0.0;
  std::size_t n = 1;
  AdaptConfig adapt;
  SeedKind seed_source = SeedKind::LowMode;
  std::uint64_t seed = 1;
  std::string output_dir = ".";

  DomainSpec domain_spec() const { return DomainSpec::from_name(domain); }
  Coefficients coefficient_fields() const;
  Mesh initial_mesh() const;
  SeedSource seed_source_fn() const;

  bool operator==(const RunConfig &other) const;
};

// Throws Error with a "line N:" prefix for malformed lines, unknown or repeated keys and
// out-of-range values.
RunConfig parse_config(std::istream &is);
RunConfig load_config(const std::string &path);

// Every key, one per line, in a form parse_config reads back.
std::string serialize_config(const RunConfig &config);

}  // namespace paro::cli

#endif  // PARO_TOOLS_RUN_CONFIG_HPP
