// Copyright The paro-afem Authors
// SPDX-License-Identifier: Apache-2.0

#include "commands.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <sstream>
#include "paro/adapt.hpp"
#include "paro/estimator.hpp"
#include "paro/io.hpp"
#include "paro/verify.hpp"
#include "run_config.hpp"

namespace paro::cli
{

namespace
{

RunConfig load_with_overrides(const CommandOptions &options)
{
  RunConfig config = load_config(options.config_path);
  if (options.output_dir)
  {
    config.output_dir = *options.output_dir;
  }
  if (options.threads)
  {
    config.adapt.paro.threads = *options.threads;
  }
  return config;
}

std::ofstream open_output(const std::filesystem::path &dir, const std::string &name)
{
  std::ofstream f(dir / name);
  if (!f)
  {
    throw Error("cannot write " + (dir / name).string());
  }
  return f;
}

void write_history_files(const std::filesystem::path &dir, std::span<const RunEntry> entries)
{
  auto history = open_output(dir, "history.csv");
  write_history_csv(history, entries);
  auto timing = open_output(dir, "timing.csv");
  write_timing_csv(timing, entries);
}

void write_run_outputs(const std::filesystem::path &dir, const AdaptResult &result)
{
  write_history_files(dir, result.entries);
  auto mesh = open_output(dir, "mesh.txt");
  write_mesh(mesh, result.mesh);
  auto orbitals = open_output(dir, "orbitals.txt");
  write_vectors(orbitals, result.block.vectors, result.system.n_dofs());
}

std::string summary_line(const AdaptResult &result)
{
  std::string s = std::to_string(result.entries.size() - 1) + "," +
                  std::to_string(result.system.n_dofs());
  for (double v : result.block.ritz_values)
  {
    s += "," + format_double(v);
  }
  return s;
}

int exit_for(StopReason reason)
{
  return reason == StopReason::Converged ? exit_code::converged : exit_code::max_refinements;
}

std::filesystem::path prepare_output_dir(const RunConfig &config)
{
  const std::filesystem::path dir(config.output_dir);
  std::filesystem::create_directories(dir);
  return dir;
}

}  // namespace

int cmd_run(const CommandOptions &options, std::ostream &out, std::ostream &err)
{
  std::filesystem::path dir;
  try
  {
    const RunConfig config = load_with_overrides(options);
    dir = prepare_output_dir(config);
    const AdaptResult result = adaptive_solve(config.initial_mesh(), config.coefficient_fields(),
                                              config.n, config.adapt, config.seed_source_fn());
    write_run_outputs(dir, result);
    out << summary_line(result) << '\n';
    return exit_for(result.reason);
  }
  catch (const AdaptFailure &e)
  {
    if (!dir.empty())
    {
      write_history_files(dir, e.entries);
    }
    err << "error: " << e.what() << '\n';
  }
  catch (const std::exception &e)
  {
    err << "error: " << e.what() << '\n';
  }
  return exit_code::error;
}

int cmd_verify(const CommandOptions &options, std::ostream &out, std::ostream &err)
{
  try
  {
    const RunConfig config = load_with_overrides(options);
    const std::filesystem::path dir = prepare_output_dir(config);
    const Mesh initial = config.initial_mesh();
    const Coefficients coeffs = config.coefficient_fields();
    const std::size_t n = config.n;

    std::vector<VerifyRow> rows;
    ShapeClassTracker shapes(initial.num_triangles());
    bool conforming = true;
    bool bounds_hold = true;
    double final_rel_gap = 0.0;
    double final_max_dist = 0.0;
    std::vector<Vector> level_values;

    auto observer = [&](const RunEntry &entry, const Mesh &mesh, const FemSystem &sys,
                        const OrbitalBlock &block, const Indicators &ind)
    {
      conforming = conforming && is_conforming(mesh);
      shapes.observe(mesh);
      const std::size_t want = std::min(n + 1, sys.n_dofs() - 1);
      const ReferencePairs ref = reference_eig(sys, want);
      const QuasiOrthogonalityReport report =
        quasi_orthogonality_report(sys, block, ref, block.layout);
      const ReferencePairs ref_n{Vector(ref.values.begin(), ref.values.begin() + n),
                                 std::vector<Vector>(ref.vectors.begin(), ref.vectors.begin() + n),
                                 {},
                                 0};
      const Indicators exact =
        estimate(mesh, coeffs, make_residual_block(sys, ref_n.vectors, ref_n.values));
      const double ratio = exact.global_sq > 0.0 ? std::sqrt(ind.global_sq / exact.global_sq) : 1.0;
      final_rel_gap = 0.0;
      final_max_dist = 0.0;
      for (std::size_t i = 0; i < block.layout.num_clusters(); i++)
      {
        VerifyRow row;
        row.n = entry.n;
        row.n_dofs = entry.n_dofs;
        row.cluster = i;
        row.multiplicity = block.layout.multiplicities()[i];
        row.dist_a = report.clusters[i].dist_a;
        for (int j = 0; j < row.multiplicity; j++)
        {
          const std::size_t k = block.layout.flat(i, j);
          const double gap = std::abs(block.ritz_values[k] - ref.values[k]);
          row.eigenvalue_gaps.push_back(gap);
          final_rel_gap = std::max(final_rel_gap, gap / std::abs(ref.values[k]));
        }
        row.matched_bound_holds = report.clusters[i].bound_holds;
        row.estimator_ratio = ratio;
        final_max_dist = std::max(final_max_dist, row.dist_a);
        rows.push_back(std::move(row));
      }
      bounds_hold = bounds_hold && report.all_bounds_hold;
      level_values.push_back(block.ritz_values);
    };

    AdaptResult result = adaptive_solve(initial, coeffs, n, config.adapt, config.seed_source_fn(),
                                        observer);
    write_run_outputs(dir, result);
    {
      auto f = std::ofstream(dir / "verify.csv");
      write_verify_csv(f, rows);
    }

    bool all = true;
    auto check = [&](const std::string &name, bool ok, const std::string &detail)
    {
      out << "CHECK " << name << ' ' << (ok ? "PASS" : "FAIL") << ' ' << detail << '\n';
      all = all && ok;
    };
    check("ritz_matches_reference", final_rel_gap <= 1e-8,
          "max_rel_gap=" + format_double(final_rel_gap) + " (<= 1e-8)");
    check("cluster_distance", final_max_dist <= 1e-6,
          "max_dist_a=" + format_double(final_max_dist) + " (<= 1e-6)");
    check("matched_basis_bound", bounds_hold, "all levels and clusters");
    bool monotone = true;
    for (std::size_t l = 1; l < level_values.size(); l++)
    {
      for (std::size_t k = 0; k < n; k++)
      {
        monotone = monotone && level_values[l][k] <= level_values[l - 1][k] + 1e-9;
      }
    }
    check("eigenvalue_monotone", monotone, "levels=" + std::to_string(level_values.size()));
    check("nvb_conforming", conforming, "every level");
    check("nvb_similarity_classes", shapes.max_classes_per_root() <= 4,
          "max_per_root=" + std::to_string(shapes.max_classes_per_root()) + " (<= 4)");

    const DomainSpec spec = config.domain_spec();
    if (spec.kind == DomainSpec::Kind::UnitSquare && config.coefficients == "laplace")
    {
      const AnalyticSpectrum exact = analytic_spectrum(spec, n);
      bool above = true;
      for (std::size_t k = 0; k < n; k++)
      {
        above = above && result.block.ritz_values[k] >= exact.values[k] - 1e-9;
      }
      check("above_analytic", above, "lambda_1=" + format_double(result.block.ritz_values[0]) +
                                       " exact=" + format_double(exact.values[0]));
    }
    else
    {
      // Fine-mesh oracle: two uniform levels (four bisection rounds) beyond the final mesh.
      const Mesh fine = refine_uniform(result.mesh, 4);
      const ReferencePairs oracle =
        reference_eig(assemble(fine, coeffs, config.adapt.quad_order), n);
      bool above = true;
      for (std::size_t k = 0; k < n; k++)
      {
        above = above && result.block.ritz_values[k] >= oracle.values[k] - 1e-9;
      }
      check("above_fine_oracle", above,
            "lambda_1=" + format_double(result.block.ritz_values[0]) +
              " oracle=" + format_double(oracle.values[0]) +
              " error=" + format_double(result.block.ritz_values[0] - oracle.values[0]));
    }
    out << summary_line(result) << '\n';
    return all ? exit_code::converged : exit_code::verification_failed;
  }
  catch (const std::exception &e)
  {
    err << "error: " << e.what() << '\n';
  }
  return exit_code::error;
}

int cmd_spectrum(std::size_t count, std::ostream &out, std::ostream &err)
{
  try
  {
    const AnalyticSpectrum s = analytic_spectrum(DomainSpec::unit_square(), count);
    out << "k,m,n,lambda\n";
    for (std::size_t k = 0; k < s.values.size(); k++)
    {
      out << k + 1 << ',' << s.modes[k].first << ',' << s.modes[k].second << ','
          << format_double(s.values[k]) << '\n';
    }
    return exit_code::converged;
  }
  catch (const std::exception &e)
  {
    err << "error: " << e.what() << '\n';
  }
  return exit_code::error;
}

}  // namespace paro::cli
