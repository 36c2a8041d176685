// Copyright The paro-afem Authors
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include "commands.hpp"
#include "paro/io.hpp"
#include "run_config.hpp"

using namespace paro;
using namespace paro::cli;

namespace fs = std::filesystem;

namespace
{

fs::path scratch(const std::string &name)
{
  const char *env = std::getenv("PARO_TEST_TMP");
  const fs::path root = env ? fs::path(env) : fs::temp_directory_path() / "paro_cli_test";
  const fs::path dir = root / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string write_config(const fs::path &dir, const std::string &text)
{
  const fs::path p = dir / "run.cfg";
  std::ofstream(p) << text;
  return p.string();
}

std::string slurp(const fs::path &p)
{
  std::ifstream f(p);
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

struct Outcome
{
  int code;
  std::string out;
  std::string err;
};

Outcome run(const std::string &config, const fs::path &out_dir, bool verify = false)
{
  CommandOptions opts;
  opts.config_path = config;
  opts.output_dir = out_dir.string();
  std::ostringstream out, err;
  const int code = verify ? cmd_verify(opts, out, err) : cmd_run(opts, out, err);
  return {code, out.str(), err.str()};
}

}  // namespace

TEST_CASE("config parsing")
{
  std::istringstream is("# comment\n"
                        "domain = l_shape\n"
                        "N = 3   # trailing\n"
                        "theta=0.3\n"
                        "\n"
                        "coefficients = constant\n"
                        "diffusion = 2,0.5,1\n"
                        "seed_source = random\n");
  const RunConfig c = parse_config(is);
  CHECK(c.domain == "l_shape");
  CHECK(c.n == 3);
  CHECK(c.adapt.theta == 0.3);
  CHECK(c.diffusion == Mat2{2.0, 0.5, 1.0});
  CHECK(c.seed_source == SeedKind::Random);

  auto fails = [](const std::string &text, const std::string &needle)
  {
    std::istringstream s(text);
    try
    {
      parse_config(s);
    }
    catch (const Error &e)
    {
      return std::string(e.what()).find(needle) != std::string::npos;
    }
    return false;
  };
  CHECK(fails("N = 1\nbogus = 3\n", "line 2"));
  CHECK(fails("N = 1\nN = 2\n", "line 2"));
  CHECK(fails("theta 0.5\n", "line 1"));
  CHECK(fails("theta = 1.5\n", "theta out of (0,1)"));
  CHECK(fails("N = abc\n", "line 1"));
  CHECK(fails("domain = disk\n", "line 1"));
  CHECK(fails("N =\n", "line 1"));
}

TEST_CASE("config round trip")
{
  RunConfig c;
  c.domain = "l_shape";
  c.n = 4;
  c.adapt.theta = 0.35;
  c.adapt.tol1 = 1e-7;
  c.adapt.paro.tol2 = 3e-11;
  c.adapt.paro.jacobi = true;
  c.adapt.estimator_matched_stop = true;
  c.coefficients = "constant";
  c.diffusion = Mat2{1.25, -0.1, 0.75};
  c.reaction = 0.1;
  c.seed = 99;
  c.adapt.paro.threads = 3;
  std::istringstream is(serialize_config(c));
  CHECK(parse_config(is) == c);
}

TEST_CASE("minimal run converges and writes outputs")
{
  const fs::path dir = scratch("minimal");
  const Outcome o = run(write_config(dir, "domain = unit_square\nN = 1\n"), dir / "out");
  CHECK(o.code == exit_code::converged);
  const std::string history = slurp(dir / "out" / "history.csv");
  CHECK(history.rfind("n,n_dofs,n_elements,", 0) == 0);
  CHECK(std::count(history.begin(), history.end(), '\n') >= 2);
  CHECK(fs::exists(dir / "out" / "mesh.txt"));
  CHECK(fs::exists(dir / "out" / "timing.csv"));

  std::ifstream orbitals(dir / "out" / "orbitals.txt");
  const auto v = read_vectors(orbitals);
  REQUIRE(v.size() == 1);
  std::ifstream mesh_file(dir / "out" / "mesh.txt");
  const Mesh mesh = read_mesh(mesh_file);
  CHECK(v[0].size() == assemble(mesh, Coefficients::laplace()).n_dofs());

  // Summary: n_refinements, final_dofs, lambda_1.
  CHECK(std::count(o.out.begin(), o.out.end(), ',') == 2);
}

TEST_CASE("max refinements exit code")
{
  const fs::path dir = scratch("capped");
  const Outcome o = run(write_config(dir, "N = 1\nmax_refinements = 2\ntol1 = 1e-12\n"), dir);
  CHECK(o.code == exit_code::max_refinements);
  CHECK(o.out.rfind("2,", 0) == 0);
}

TEST_CASE("invalid configs exit 1 with a diagnostic")
{
  const fs::path dir = scratch("invalid");
  const Outcome theta = run(write_config(dir, "N = 1\ntheta = 1.5\n"), dir);
  CHECK(theta.code == exit_code::error);
  CHECK(theta.err.find("theta out of (0,1)") != std::string::npos);

  const Outcome too_many = run(write_config(dir, "N = 9\ninitial_refinements = 4\n"), dir);
  CHECK(too_many.code == exit_code::error);
  CHECK(too_many.err.find("dofs") != std::string::npos);

  const Outcome verify_many = run(write_config(dir, "N = 9\n"), dir, true);
  CHECK(verify_many.code == exit_code::error);

  const Outcome missing = run((dir / "nope.cfg").string(), dir);
  CHECK(missing.code == exit_code::error);
}

TEST_CASE("identical runs give identical history")
{
  const fs::path dir = scratch("determinism");
  const std::string cfg =
    write_config(dir, "N = 2\nseed_source = random\nseed = 5\nmax_refinements = 5\n");
  run(cfg, dir / "a");
  run(cfg, dir / "b");
  const std::string a = slurp(dir / "a" / "history.csv");
  CHECK_FALSE(a.empty());
  CHECK(a == slurp(dir / "b" / "history.csv"));
  CHECK(slurp(dir / "a" / "orbitals.txt") == slurp(dir / "b" / "orbitals.txt"));
}

TEST_CASE("verify on the unit square")
{
  const fs::path dir = scratch("verify_square");
  const Outcome o = run(write_config(dir, "N = 6\ninitial_refinements = 6\nmax_refinements = 4\n"
                                          "tol2 = 1e-12\n"),
                        dir, true);
  CHECK(o.code == exit_code::converged);
  CHECK(o.out.find("FAIL") == std::string::npos);
  CHECK(o.out.find("CHECK above_analytic PASS") != std::string::npos);
  const std::string v = slurp(dir / "verify.csv");
  CHECK(v.rfind("n,n_dofs,cluster,multiplicity,dist_a,", 0) == 0);
}

TEST_CASE("verify on the L-shape uses the fine oracle")
{
  const fs::path dir = scratch("verify_l");
  const Outcome o = run(write_config(dir, "domain = l_shape\nN = 1\ninitial_refinements = 2\n"
                                          "max_refinements = 5\n"),
                        dir, true);
  CHECK(o.code == exit_code::converged);
  CHECK(o.out.find("CHECK above_fine_oracle PASS") != std::string::npos);
  CHECK(fs::exists(dir / "verify.csv"));
}

TEST_CASE("spectrum command")
{
  std::ostringstream out, err;
  CHECK(cmd_spectrum(3, out, err) == 0);
  CHECK(out.str().rfind("k,m,n,lambda\n1,1,1,19.73920880217", 0) == 0);
}
