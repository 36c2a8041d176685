// Copyright The paro-afem Authors
// SPDX-License-Identifier: Apache-2.0

#include "run_config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <istream>
#include <set>
#include <sstream>
#include <vector>
#include "paro/format.hpp"

namespace paro::cli
{

namespace
{

std::string trim(const std::string &s)
{
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos)
  {
    return {};
  }
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

double to_double(const std::string &v)
{
  double x = 0.0;
  const auto r = std::from_chars(v.data(), v.data() + v.size(), x);
  if (r.ec != std::errc() || r.ptr != v.data() + v.size() || !std::isfinite(x))
  {
    throw Error("'" + v + "' is not a finite number");
  }
  return x;
}

template <typename Int>
Int to_int(const std::string &v)
{
  Int x = 0;
  const auto r = std::from_chars(v.data(), v.data() + v.size(), x);
  if (r.ec != std::errc() || r.ptr != v.data() + v.size())
  {
    throw Error("'" + v + "' is not a valid integer");
  }
  return x;
}

bool to_bool(const std::string &v)
{
  if (v == "true" || v == "1" || v == "yes" || v == "on")
  {
    return true;
  }
  if (v == "false" || v == "0" || v == "no" || v == "off")
  {
    return false;
  }
  throw Error("'" + v + "' is not a boolean");
}

std::string from_bool(bool b)
{
  return b ? "true" : "false";
}

Mat2 to_mat2(const std::string &v)
{
  std::vector<double> parts;
  std::stringstream ss(v);
  std::string item;
  while (std::getline(ss, item, ','))
  {
    parts.push_back(to_double(trim(item)));
  }
  if (parts.size() == 1)
  {
    return Mat2::scalar(parts[0]);
  }
  if (parts.size() == 3)
  {
    return {parts[0], parts[1], parts[2]};
  }
  throw Error("'" + v + "' must be a scalar or 'a_xx,a_xy,a_yy'");
}

std::string from_mat2(const Mat2 &a)
{
  return format_double(a.xx) + "," + format_double(a.xy) + "," + format_double(a.yy);
}

void require(bool ok, const char *message)
{
  if (!ok)
  {
    throw Error(message);
  }
}

struct Key
{
  const char *name;
  std::function<void(RunConfig &, const std::string &)> set;
  std::function<std::string(const RunConfig &)> get;
};

const std::vector<Key> &keys()
{
  static const std::vector<Key> table = {
    {"domain",
     [](RunConfig &c, const std::string &v)
     {
       DomainSpec::from_name(v);
       require(v != "explicit", "domain must be unit_square or l_shape");
       c.domain = v;
     },
     [](const RunConfig &c) { return c.domain; }},
    {"initial_refinements",
     [](RunConfig &c, const std::string &v)
     {
       c.initial_refinements = to_int<int>(v);
       require(c.initial_refinements >= 0, "initial_refinements must be nonnegative");
     },
     [](const RunConfig &c) { return std::to_string(c.initial_refinements); }},
    {"coefficients",
     [](RunConfig &c, const std::string &v)
     {
       require(v == "laplace" || v == "constant", "coefficients must be laplace or constant");
       c.coefficients = v;
     },
     [](const RunConfig &c) { return c.coefficients; }},
    {"diffusion",
     [](RunConfig &c, const std::string &v)
     {
       c.diffusion = to_mat2(v);
       require(c.diffusion.min_eigenvalue() > 0.0, "diffusion must be positive definite");
     },
     [](const RunConfig &c) { return from_mat2(c.diffusion); }},
    {"reaction",
     [](RunConfig &c, const std::string &v)
     {
       c.reaction = to_double(v);
       require(c.reaction >= 0.0, "reaction must be nonnegative");
     },
     [](const RunConfig &c) { return format_double(c.reaction); }},
    {"N",
     [](RunConfig &c, const std::string &v)
     {
       c.n = to_int<std::size_t>(v);
       require(c.n >= 1, "N must be at least 1");
     },
     [](const RunConfig &c) { return std::to_string(c.n); }},
    {"theta",
     [](RunConfig &c, const std::string &v)
     {
       c.adapt.theta = to_double(v);
       require(c.adapt.theta > 0.0 && c.adapt.theta < 1.0, "theta out of (0,1)");
     },
     [](const RunConfig &c) { return format_double(c.adapt.theta); }},
    {"ell",
     [](RunConfig &c, const std::string &v)
     {
       c.adapt.ell = to_int<int>(v);
       require(c.adapt.ell >= 1, "ell must be at least 1");
     },
     [](const RunConfig &c) { return std::to_string(c.adapt.ell); }},
    {"tol1",
     [](RunConfig &c, const std::string &v)
     {
       c.adapt.tol1 = to_double(v);
       require(c.adapt.tol1 > 0.0, "tol1 must be positive");
     },
     [](const RunConfig &c) { return format_double(c.adapt.tol1); }},
    {"tol2",
     [](RunConfig &c, const std::string &v)
     {
       c.adapt.paro.tol2 = to_double(v);
       require(c.adapt.paro.tol2 > 0.0, "tol2 must be positive");
     },
     [](const RunConfig &c) { return format_double(c.adapt.paro.tol2); }},
    {"max_inner",
     [](RunConfig &c, const std::string &v)
     {
       c.adapt.paro.max_inner = to_int<int>(v);
       require(c.adapt.paro.max_inner >= 1, "max_inner must be at least 1");
     },
     [](const RunConfig &c) { return std::to_string(c.adapt.paro.max_inner); }},
    {"rel_gap",
     [](RunConfig &c, const std::string &v)
     {
       c.adapt.paro.rel_gap = to_double(v);
       require(c.adapt.paro.rel_gap > 0.0, "rel_gap must be positive");
     },
     [](const RunConfig &c) { return format_double(c.adapt.paro.rel_gap); }},
    {"max_refinements",
     [](RunConfig &c, const std::string &v)
     {
       c.adapt.max_refinements = to_int<int>(v);
       require(c.adapt.max_refinements >= 0, "max_refinements must be nonnegative");
     },
     [](const RunConfig &c) { return std::to_string(c.adapt.max_refinements); }},
    {"max_dofs",
     [](RunConfig &c, const std::string &v) { c.adapt.max_dofs = to_int<std::size_t>(v); },
     [](const RunConfig &c) { return std::to_string(c.adapt.max_dofs); }},
    {"minres_tol",
     [](RunConfig &c, const std::string &v)
     {
       c.adapt.paro.minres_tol = to_double(v);
       require(c.adapt.paro.minres_tol > 0.0, "minres_tol must be positive");
     },
     [](const RunConfig &c) { return format_double(c.adapt.paro.minres_tol); }},
    {"minres_max_iter",
     [](RunConfig &c, const std::string &v)
     { c.adapt.paro.minres_max_iter = to_int<std::size_t>(v); },
     [](const RunConfig &c) { return std::to_string(c.adapt.paro.minres_max_iter); }},
    {"jacobi", [](RunConfig &c, const std::string &v) { c.adapt.paro.jacobi = to_bool(v); },
     [](const RunConfig &c) { return from_bool(c.adapt.paro.jacobi); }},
    {"estimator_matched_stop",
     [](RunConfig &c, const std::string &v) { c.adapt.estimator_matched_stop = to_bool(v); },
     [](const RunConfig &c) { return from_bool(c.adapt.estimator_matched_stop); }},
    {"budget_factor",
     [](RunConfig &c, const std::string &v)
     {
       c.adapt.budget_factor = to_double(v);
       require(c.adapt.budget_factor > 0.0, "budget_factor must be positive");
     },
     [](const RunConfig &c) { return format_double(c.adapt.budget_factor); }},
    {"quad_order",
     [](RunConfig &c, const std::string &v)
     {
       c.adapt.quad_order = to_int<int>(v);
       require(c.adapt.quad_order >= 1 && c.adapt.quad_order <= 3, "quad_order must be 1, 2 or 3");
     },
     [](const RunConfig &c) { return std::to_string(c.adapt.quad_order); }},
    {"seed_source",
     [](RunConfig &c, const std::string &v)
     {
       if (v == "low_mode")
       {
         c.seed_source = SeedKind::LowMode;
       }
       else if (v == "reference")
       {
         c.seed_source = SeedKind::Reference;
       }
       else if (v == "random")
       {
         c.seed_source = SeedKind::Random;
       }
       else
       {
         throw Error("seed_source must be low_mode, reference or random");
       }
     },
     [](const RunConfig &c)
     {
       switch (c.seed_source)
       {
         case SeedKind::LowMode:
           return std::string("low_mode");
         case SeedKind::Reference:
           return std::string("reference");
         case SeedKind::Random:
           break;
       }
       return std::string("random");
     }},
    {"seed", [](RunConfig &c, const std::string &v) { c.seed = to_int<std::uint64_t>(v); },
     [](const RunConfig &c) { return std::to_string(c.seed); }},
    {"threads",
     [](RunConfig &c, const std::string &v) { c.adapt.paro.threads = to_int<std::size_t>(v); },
     [](const RunConfig &c) { return std::to_string(c.adapt.paro.threads); }},
    {"output_dir",
     [](RunConfig &c, const std::string &v)
     {
       require(!v.empty(), "output_dir must not be empty");
       c.output_dir = v;
     },
     [](const RunConfig &c) { return c.output_dir; }},
  };
  return table;
}

}  // namespace

Coefficients RunConfig::coefficient_fields() const
{
  Coefficients c;
  if (coefficients == "constant")
  {
    c.diffusion = diffusion;
    c.reaction = reaction;
  }
  return c;
}

Mesh RunConfig::initial_mesh() const
{
  return refine_uniform(build_initial_mesh(domain_spec()), initial_refinements);
}

SeedSource RunConfig::seed_source_fn() const
{
  switch (seed_source)
  {
    case SeedKind::Reference:
      return reference_seed();
    case SeedKind::Random:
      return random_seed(seed);
    case SeedKind::LowMode:
      break;
  }
  // Two bisection rounds coarser (half the mesh size), as long as that level still carries
  // more than N dofs; otherwise the initial level itself.
  const DomainSpec spec = domain_spec();
  const Coefficients coeffs = coefficient_fields();
  int rounds = initial_refinements;
  if (initial_refinements >= 2)
  {
    const Mesh coarse = refine_uniform(build_initial_mesh(spec), initial_refinements - 2);
    if (assemble(coarse, coeffs).n_dofs() > 2 * n + 2)
    {
      rounds = initial_refinements - 2;
    }
  }
  return low_mode_seed(spec, rounds, coeffs, adapt.quad_order);
}

bool RunConfig::operator==(const RunConfig &other) const
{
  return domain == other.domain && initial_refinements == other.initial_refinements &&
         coefficients == other.coefficients && diffusion == other.diffusion &&
         reaction == other.reaction && n == other.n && adapt == other.adapt &&
         seed_source == other.seed_source && seed == other.seed &&
         output_dir == other.output_dir;
}

RunConfig parse_config(std::istream &is)
{
  RunConfig config;
  std::set<std::string> seen;
  std::string raw;
  int line_no = 0;
  while (std::getline(is, raw))
  {
    line_no++;
    const auto hash = raw.find('#');
    const std::string line = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
    if (line.empty())
    {
      continue;
    }
    const std::string where = "line " + std::to_string(line_no) + ": ";
    const auto eq = line.find('=');
    if (eq == std::string::npos)
    {
      throw Error(where + "expected 'key = value', got '" + line + "'");
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    const auto &table = keys();
    const auto it = std::find_if(table.begin(), table.end(),
                                 [&](const Key &k) { return key == k.name; });
    if (it == table.end())
    {
      throw Error(where + "unknown key '" + key + "'");
    }
    if (!seen.insert(key).second)
    {
      throw Error(where + "key '" + key + "' given twice");
    }
    if (value.empty())
    {
      throw Error(where + "key '" + key + "' has no value");
    }
    try
    {
      it->set(config, value);
    }
    catch (const Error &e)
    {
      throw Error(where + e.what());
    }
  }
  try
  {
    config.adapt.validate();
  }
  catch (const Error &e)
  {
    throw Error(std::string("config: ") + e.what());
  }
  return config;
}

RunConfig load_config(const std::string &path)
{
  std::ifstream in(path);
  if (!in)
  {
    throw Error("cannot open config file '" + path + "'");
  }
  return parse_config(in);
}

std::string serialize_config(const RunConfig &config)
{
  std::string out;
  for (const auto &k : keys())
  {
    out += std::string(k.name) + " = " + k.get(config) + "\n";
  }
  return out;
}

}  // namespace paro::cli
