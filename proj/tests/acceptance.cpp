// Copyright The paro-afem Authors
// SPDX-License-Identifier: Apache-2.0

// Acceptance checks: one PASS/FAIL line per criterion, nonzero exit if any fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <numbers>
#include <optional>
#include <random>
#include <string>
#include <vector>
#include "paro/adapt.hpp"
#include "paro/estimator.hpp"
#include "paro/format.hpp"
#include "paro/verify.hpp"

using namespace paro;

namespace
{

const double two_pi_sq = 2.0 * std::numbers::pi * std::numbers::pi;

struct Outcome
{
  bool pass = false;
  std::string detail;
};

std::string fmt(double v)
{
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4g", v);
  return buf;
}

Mesh square(int rounds)
{
  return refine_uniform(build_initial_mesh(DomainSpec::unit_square()), rounds);
}

// Rounds of bisection giving interior mesh size 1/k on the unit square.
int rounds_for(int k)
{
  return 2 * static_cast<int>(std::lround(std::log2(k)));
}

InnerResult paro_on(const Mesh &mesh, const FemSystem &sys, std::size_t n, double tol2,
                    int coarse_rounds)
{
  const auto seeds =
    low_mode_seed(DomainSpec::unit_square(), coarse_rounds, Coefficients::laplace())(mesh, sys, n);
  ParoTolerances tols;
  tols.tol2 = tol2;
  return paro_inner_loop(sys, ritz_step(sys, seeds, tols.rel_gap), tols);
}

// Prefix of a reference computation matching the flat range of a block.
ReferencePairs head(const ReferencePairs &ref, std::size_t n)
{
  ReferencePairs h;
  h.values.assign(ref.values.begin(), ref.values.begin() + n);
  h.vectors.assign(ref.vectors.begin(), ref.vectors.begin() + n);
  return h;
}

//
// AC1: uniform convergence of the ground state on the unit square.
//
Outcome ac1()
{
  std::vector<double> err;
  bool above = true;
  for (int k : {8, 16, 32})
  {
    const Mesh mesh = square(rounds_for(k));
    const FemSystem sys = assemble(mesh, Coefficients::laplace());
    const InnerResult r = paro_on(mesh, sys, 1, 1e-10, 4);
    const double e = r.block.ritz_values[0] - two_pi_sq;
    above = above && e > 0.0;
    err.push_back(e);
  }
  const double r1 = err[0] / err[1], r2 = err[1] / err[2];
  const bool ratios = r1 >= 3.4 && r1 <= 4.6 && r2 >= 3.4 && r2 <= 4.6;
  return {above && ratios, "errors=" + fmt(err[0]) + "," + fmt(err[1]) + "," + fmt(err[2]) +
                             " ratios=" + fmt(r1) + "," + fmt(r2) + " (in [3.4,4.6], all > 0)"};
}

//
// AC2 / AC7: fixed mesh, six orbitals in four clusters.
//
struct FixedMeshRun
{
  Mesh mesh;
  FemSystem sys;
  InnerResult inner;
  ReferencePairs ref;
};

FixedMeshRun fixed_mesh_run()
{
  FixedMeshRun run;
  run.mesh = square(rounds_for(16));
  run.sys = assemble(run.mesh, Coefficients::laplace());
  run.inner = paro_on(run.mesh, run.sys, 6, 1e-10, 6);
  run.ref = reference_eig(run.sys, 7);
  return run;
}

Outcome ac2(const FixedMeshRun &run)
{
  const OrbitalBlock &b = run.inner.block;
  double max_rel = 0.0;
  for (std::size_t k = 0; k < 6; k++)
  {
    max_rel = std::max(max_rel, std::abs(b.ritz_values[k] - run.ref.values[k]) / run.ref.values[k]);
  }
  const QuasiOrthogonalityReport rep = quasi_orthogonality_report(run.sys, b, run.ref, b.layout);
  double max_dist = 0.0;
  for (const auto &c : rep.clusters)
  {
    max_dist = std::max(max_dist, c.dist_a);
  }
  const bool layout = b.layout.multiplicities() == std::vector<int>{1, 2, 1, 2};
  std::string mult;
  for (int d : b.layout.multiplicities())
  {
    mult += (mult.empty() ? "" : ";") + std::to_string(d);
  }
  return {layout && max_rel <= 1e-8 && max_dist <= 1e-6 && run.inner.converged,
          "clusters=" + mult + " m=" + std::to_string(run.inner.m_used) +
            " max_rel_gap=" + fmt(max_rel) + " (<= 1e-8) max_dist_a=" + fmt(max_dist) +
            " (<= 1e-6)"};
}

Outcome ac7(const FixedMeshRun &run)
{
  const OrbitalBlock &b = run.inner.block;
  const QuasiOrthogonalityReport rep = quasi_orthogonality_report(run.sys, b, run.ref, b.layout);
  double worst = 0.0;
  std::size_t checked = 0;
  for (const auto &c : rep.clusters)
  {
    for (double d : c.matched_distances)
    {
      worst = std::max(worst, c.bound > 0.0 ? d / c.bound : (d > 0.0 ? INFINITY : 0.0));
      checked++;
    }
  }
  return {rep.all_bounds_hold && checked == 6,
          "pairs=" + std::to_string(checked) + " max(distance/bound)=" + fmt(worst) +
            " g=" + fmt(rep.g) + " gamma=" + fmt(rep.gamma)};
}

//
// AC3: the gap between the exact-pair and the computed-pair estimators is controlled by
// the eigenpair error with a mesh-independent constant.
//
Outcome ac3()
{
  std::vector<double> constants;
  std::string detail;
  const std::size_t n = 3;
  for (int k : {8, 16, 32})
  {
    const Mesh mesh = square(rounds_for(k));
    const FemSystem sys = assemble(mesh, Coefficients::laplace());
    const ReferencePairs ref = reference_eig(sys, n + 1);
    const ReferencePairs exact = head(ref, n);
    const double eta =
      std::sqrt(estimate(mesh, Coefficients::laplace(), make_residual_block(sys, exact.vectors,
                                                                            exact.values))
                  .global_sq);
    std::mt19937_64 rng(2024);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    double c_max = 0.0;
    for (double delta : {1e-2, 3e-3, 1e-3})
    {
      // Perturbation of unit energy per orbital, scaled by delta.
      std::vector<Vector> v = exact.vectors;
      for (auto &x : v)
      {
        Vector e(sys.n_dofs());
        for (double &c : e)
        {
          c = u(rng);
        }
        scale(delta / energy_norm(sys, e), e);
        axpy(1.0, e, x);
      }
      const OrbitalBlock b = ritz_step(sys, v, 0.02);
      const double eta_t = std::sqrt(estimate(mesh, Coefficients::laplace(), sys, b).global_sq);
      const QuasiOrthogonalityReport rep =
        quasi_orthogonality_report(sys, b, ref, b.layout);
      double denom = 0.0;
      for (const auto &c : rep.clusters)
      {
        denom += c.dist_a * c.dist_a;
      }
      for (std::size_t j = 0; j < n; j++)
      {
        denom += std::pow(b.ritz_values[j] - exact.values[j], 2);
      }
      c_max = std::max(c_max, std::pow(eta - eta_t, 2) / denom);
    }
    constants.push_back(c_max);
    detail += (detail.empty() ? "" : ",") + fmt(c_max);
  }
  const double spread = *std::max_element(constants.begin(), constants.end()) /
                        *std::min_element(constants.begin(), constants.end());
  return {spread <= 10.0, "C_h=" + detail + " max/min=" + fmt(spread) + " (<= 10)"};
}

//
// AC4 / AC9: adaptive contraction on the unit square.
//
struct ShapeWatch
{
  ShapeClassTracker tracker;
  bool conforming = true;
  std::size_t levels = 0;

  explicit ShapeWatch(const Mesh &initial) : tracker(initial.num_triangles()) {}
  void observe(const Mesh &mesh)
  {
    conforming = conforming && is_conforming(mesh);
    tracker.observe(mesh);
    levels++;
  }
};

Outcome ac4(ShapeWatch &watch)
{
  AdaptConfig config;
  config.theta = 0.5;
  config.tol1 = 1e-14;
  config.max_refinements = 14;
  config.paro.tol2 = 1e-10;
  const Mesh initial = square(4);
  const LevelObserver obs = [&](const RunEntry &, const Mesh &mesh, const FemSystem &,
                                const OrbitalBlock &, const Indicators &) { watch.observe(mesh); };
  const AdaptResult r =
    adaptive_solve(initial, Coefficients::laplace(), 1, config,
                   low_mode_seed(DomainSpec::unit_square(), 4, Coefficients::laplace()), obs);
  Vector level, eta_sq;
  bool monotone = true;
  bool above = true;
  for (std::size_t l = 0; l < r.entries.size(); l++)
  {
    level.push_back(static_cast<double>(l));
    eta_sq.push_back(r.entries[l].global_estimator_sq);
    const double e = r.entries[l].ritz_values[0] - two_pi_sq;
    above = above && e > 0.0;
    if (l > 0)
    {
      monotone = monotone && e <= r.entries[l - 1].ritz_values[0] - two_pi_sq + 1e-9;
    }
  }
  const RateFit fit = fit_semilog(level, eta_sq);
  const bool ok = r.entries.size() >= 9 && fit.slope < 0.0 && fit.r_squared >= 0.95 && monotone &&
                  above;
  return {ok, "refinements=" + std::to_string(r.entries.size() - 1) + " beta^2=" +
                fmt(std::exp(fit.slope)) + " R^2=" + fmt(fit.r_squared) +
                " (>= 0.95) monotone=" + (monotone ? "yes" : "no")};
}

//
// AC5 / AC9: L-shape, adaptive against uniform.
//
Outcome ac5(ShapeWatch &watch)
{
  const Mesh initial = build_initial_mesh(DomainSpec::l_shape());
  AdaptConfig config;
  config.theta = 0.5;
  config.tol1 = 1e-14;
  config.max_refinements = 60;
  config.max_dofs = 20000;
  const LevelObserver obs = [&](const RunEntry &, const Mesh &mesh, const FemSystem &,
                                const OrbitalBlock &, const Indicators &) { watch.observe(mesh); };
  const AdaptResult adaptive =
    adaptive_solve(refine_uniform(initial, 2), Coefficients::laplace(), 1, config, reference_seed(),
                   obs);

  // Oracle: four more bisection rounds everywhere on the final adaptive mesh.
  const Mesh fine = refine_uniform(adaptive.mesh, 4);
  const double oracle = reference_eig(assemble(fine, Coefficients::laplace()), 1).values[0];

  Vector a_dofs, a_err;
  for (const auto &e : adaptive.entries)
  {
    a_dofs.push_back(static_cast<double>(e.n_dofs));
    a_err.push_back(e.ritz_values[0] - oracle);
  }
  Vector u_dofs, u_err;
  for (int rounds = 2; rounds <= 14; rounds += 2)
  {
    const Mesh mesh = refine_uniform(initial, rounds);
    const FemSystem sys = assemble(mesh, Coefficients::laplace());
    u_dofs.push_back(static_cast<double>(sys.n_dofs()));
    u_err.push_back(reference_eig(sys, 1).values[0] - oracle);
  }

  // Both rates are fitted over the finer half of their levels.
  auto tail_fit = [](const Vector &x, const Vector &y)
  {
    const std::size_t start = x.size() / 2;
    return fit_rate(std::span<const double>(x).subspan(start),
                    std::span<const double>(y).subspan(start));
  };
  const RateFit a_fit = tail_fit(a_dofs, a_err);
  const RateFit u_fit = tail_fit(u_dofs, u_err);

  const double target = u_err.back();
  double a_need = INFINITY;
  for (std::size_t l = 0; l < a_err.size(); l++)
  {
    if (a_err[l] <= target)
    {
      a_need = a_dofs[l];
      break;
    }
  }
  const double u_need = u_dofs.back();
  const bool ok = a_fit.slope <= -0.85 && u_fit.slope >= -0.75 && a_need <= 0.5 * u_need;
  return {ok, "oracle=" + format_double(oracle) + " adaptive_slope=" + fmt(a_fit.slope) +
                " (<= -0.85) uniform_slope=" + fmt(u_fit.slope) + " (>= -0.75) target=" +
                fmt(target) + " dofs adaptive/uniform=" + fmt(a_need) + "/" + fmt(u_need) +
                " (<= 1/2)"};
}

//
// AC6: Doerfler sets are exact and minimal.
//
Outcome ac6()
{
  std::mt19937_64 rng(6);
  std::uniform_int_distribution<int> size(1, 500);
  std::lognormal_distribution<double> value(0.0, 2.0);
  int failures = 0, trials = 0;
  for (double theta : {0.2, 0.5, 0.8})
  {
    for (int t = 0; t < 1000; t++)
    {
      Indicators ind;
      ind.per_element.resize(static_cast<std::size_t>(size(rng)));
      for (double &x : ind.per_element)
      {
        x = value(rng);
        ind.global_sq += x;
      }
      std::vector<int> marked = dorfler_mark(ind, theta);
      double sum = 0.0, smallest = INFINITY;
      for (int k : marked)
      {
        sum += ind.per_element[k];
        smallest = std::min(smallest, ind.per_element[k]);
      }
      const bool bound = sum >= theta * ind.global_sq;
      const bool minimal = sum - smallest < theta * ind.global_sq;
      failures += (bound && minimal) ? 0 : 1;
      trials++;
    }
  }
  return {failures == 0,
          "trials=" + std::to_string(trials) + " failures=" + std::to_string(failures)};
}

//
// AC8: the estimator-matched inner stop saves ParO iterations at little cost in accuracy.
//
Outcome ac8()
{
  auto run = [](bool matched)
  {
    AdaptConfig config;
    config.tol1 = 1e-14;
    config.max_refinements = 14;
    config.paro.tol2 = 1e-10;
    config.estimator_matched_stop = matched;
    return adaptive_solve(square(6), Coefficients::laplace(), 3, config,
                          low_mode_seed(DomainSpec::unit_square(), 4, Coefficients::laplace()));
  };
  const AdaptResult fixed = run(false);
  const AdaptResult matched = run(true);
  auto total = [](const AdaptResult &r)
  {
    int m = 0;
    for (const auto &e : r.entries)
    {
      m += e.m_used;
    }
    return m;
  };
  const AnalyticSpectrum exact = analytic_spectrum(DomainSpec::unit_square(), 3);
  auto error = [&](const AdaptResult &r)
  {
    double s = 0.0;
    for (std::size_t k = 0; k < 3; k++)
    {
      s += r.block.ritz_values[k] - exact.values[k];
    }
    return s;
  };
  const double share = static_cast<double>(total(matched)) / total(fixed);
  const double degradation = error(matched) / error(fixed) - 1.0;
  return {share <= 0.6 && degradation <= 0.1,
          "iterations matched/fixed=" + std::to_string(total(matched)) + "/" +
            std::to_string(total(fixed)) + "=" + fmt(share) + " (<= 0.6) error_degradation=" +
            fmt(degradation) + " (<= 0.1)"};
}

Outcome ac9(const ShapeWatch &a, const ShapeWatch &b)
{
  const std::size_t classes =
    std::max(a.tracker.max_classes_per_root(), b.tracker.max_classes_per_root());
  return {a.conforming && b.conforming && classes <= 4,
          "levels=" + std::to_string(a.levels + b.levels) + " conforming=" +
            (a.conforming && b.conforming ? "yes" : "no") +
            " max_classes_per_root=" + std::to_string(classes) + " (<= 4)"};
}

}  // namespace

int main()
{
  bool all = true;
  auto report = [&](const std::string &name, const std::function<Outcome()> &check)
  {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try
    {
      o = check();
    }
    catch (const std::exception &e)
    {
      o = {false, std::string("error: ") + e.what()};
    }
    const double secs =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::cout << name << ' ' << (o.pass ? "PASS" : "FAIL") << ' ' << o.detail << " ["
              << fmt(secs) << "s]" << std::endl;
    all = all && o.pass;
  };

  report("AC1", ac1);
  std::optional<FixedMeshRun> fixed;
  report("AC2",
         [&]
         {
           fixed = fixed_mesh_run();
           return ac2(*fixed);
         });
  report("AC3", ac3);
  ShapeWatch square_watch(square(0));
  report("AC4", [&] { return ac4(square_watch); });
  ShapeWatch l_watch(build_initial_mesh(DomainSpec::l_shape()));
  report("AC5", [&] { return ac5(l_watch); });
  report("AC6", ac6);
  report("AC7", [&] { return fixed ? ac7(*fixed) : Outcome{false, "no fixed-mesh run"}; });
  report("AC8", ac8);
  report("AC9", [&] { return ac9(square_watch, l_watch); });
  return all ? 0 : 1;
}
