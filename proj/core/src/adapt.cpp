// Copyright The paro-afem Authors
// SPDX-License-Identifier: Apache-2.0

#include "paro/adapt.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>
#include <random>
#include "paro/verify.hpp"

namespace paro
{

void AdaptConfig::validate() const
{
  if (!(theta > 0.0 && theta < 1.0))
  {
    throw Error("theta out of (0,1)");
  }
  if (ell < 1)
  {
    throw Error("ell must be at least 1");
  }
  if (!(tol1 > 0.0))
  {
    throw Error("tol1 must be positive");
  }
  if (max_refinements < 0)
  {
    throw Error("max_refinements must be nonnegative");
  }
  if (!(paro.tol2 > 0.0))
  {
    throw Error("tol2 must be positive");
  }
  if (paro.max_inner < 1)
  {
    throw Error("max_inner must be at least 1");
  }
  if (!(paro.minres_tol > 0.0))
  {
    throw Error("minres_tol must be positive");
  }
  if (!(paro.rel_gap > 0.0))
  {
    throw Error("rel_gap must be positive");
  }
  if (!(budget_factor > 0.0))
  {
    throw Error("budget_factor must be positive");
  }
  if (quad_order < 1 || quad_order > 3)
  {
    throw Error("quad_order must be 1, 2 or 3");
  }
}

std::vector<int> dorfler_mark(const Indicators &indicators, double theta)
{
  if (!(theta > 0.0 && theta < 1.0))
  {
    throw Error("dorfler_mark: theta out of (0,1)");
  }
  const auto &eta = indicators.per_element;
  double total = 0.0;
  for (double v : eta)
  {
    total += v;
  }
  if (!(total > 0.0))
  {
    return {};
  }
  std::vector<int> order(eta.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return eta[a] > eta[b]; });
  std::vector<int> marked;
  double sum = 0.0;
  const double target = theta * total;
  for (int t : order)
  {
    marked.push_back(t);
    sum += eta[t];
    if (sum >= target)
    {
      break;
    }
  }
  return marked;
}

namespace
{

double seconds_since(std::chrono::steady_clock::time_point start)
{
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

}  // namespace

AdaptResult adaptive_solve(const Mesh &initial, const Coefficients &coeffs, std::size_t n,
                           const AdaptConfig &config, const SeedSource &seed,
                           const LevelObserver &observer)
{
  config.validate();
  if (n == 0)
  {
    throw Error("adaptive_solve: N must be at least 1");
  }
  AdaptResult result;
  result.mesh = initial;
  result.system = assemble(result.mesh, coeffs, config.quad_order);
  if (n >= result.system.n_dofs())
  {
    throw Error("N = " + std::to_string(n) + " must be smaller than the " +
                std::to_string(result.system.n_dofs()) + " dofs of the initial mesh");
  }

  try
  {
    const std::vector<Vector> seeds = seed(result.mesh, result.system, n);
    if (seeds.size() != n)
    {
      throw Error("seed source returned " + std::to_string(seeds.size()) + " vectors, expected " +
                  std::to_string(n));
    }
    result.block = ritz_step(result.system, seeds, config.paro.rel_gap);

    Vector previous;
    for (int level = 0;; level++)
    {
      const auto start = std::chrono::steady_clock::now();
      InnerStop stop;
      if (config.estimator_matched_stop)
      {
        stop = [&](const OrbitalBlock &b, double delta2)
        {
          const Indicators ind =
            estimate(result.mesh, coeffs, result.system, b, config.paro.threads);
          double lam = 0.0;
          for (double v : b.ritz_values)
          {
            lam += std::abs(v);
          }
          return delta2 < config.budget_factor * std::sqrt(ind.global_sq) / lam;
        };
      }
      InnerResult inner = paro_inner_loop(result.system, result.block, config.paro, stop);
      result.block = std::move(inner.block);
      const Indicators ind = estimate(result.mesh, coeffs, result.system, result.block,
                                      config.paro.threads);

      RunEntry entry;
      entry.n = level;
      entry.n_dofs = result.system.n_dofs();
      entry.n_elements = result.mesh.num_triangles();
      entry.ritz_values = result.block.ritz_values;
      entry.multiplicities = result.block.layout.multiplicities();
      entry.global_estimator_sq = ind.global_sq;
      entry.m_used = inner.m_used;
      entry.minres_iterations = inner.minres_iterations;
      entry.delta1 = previous.empty()
                       ? NAN
                       : relative_eigenvalue_change(result.block.ritz_values, previous);
      entry.wall_time = seconds_since(start);
      result.entries.push_back(entry);
      if (observer)
      {
        observer(entry, result.mesh, result.system, result.block, ind);
      }

      if (level > 0 && entry.delta1 <= config.tol1)
      {
        result.reason = StopReason::Converged;
        break;
      }
      if (level >= config.max_refinements)
      {
        result.reason = StopReason::MaxRefinements;
        break;
      }
      if (config.max_dofs > 0 && result.system.n_dofs() >= config.max_dofs)
      {
        result.reason = StopReason::MaxDofs;
        break;
      }
      const std::vector<int> marked = dorfler_mark(ind, config.theta);
      if (marked.empty())
      {
        result.reason = StopReason::Converged;
        break;
      }
      previous = result.block.ritz_values;

      const Refinement refinement = refine(result.mesh, marked, config.ell);
      FemSystem fine = assemble(refinement.mesh, coeffs, config.quad_order);
      std::vector<Vector> transferred;
      transferred.reserve(n);
      for (const auto &u : result.block.vectors)
      {
        const Vector nodal = interpolate(result.mesh, refinement, result.system.expand(u));
        transferred.push_back(fine.restrict(nodal));
      }
      result.mesh = refinement.mesh;
      result.system = std::move(fine);
      result.block = ritz_step(result.system, transferred, config.paro.rel_gap);
    }
  }
  catch (const AdaptFailure &)
  {
    throw;
  }
  catch (const Error &e)
  {
    throw AdaptFailure(std::string("adaptive_solve failed at level ") +
                         std::to_string(result.entries.size()) + ": " + e.what(),
                       result.entries);
  }
  return result;
}

Vector evaluate_p1(const Mesh &from, std::span<const double> vertex_values, const Mesh &to)
{
  if (vertex_values.size() != from.num_vertices())
  {
    throw Error("evaluate_p1: expected one value per source vertex");
  }
  // Bucket the source triangles by bounding box.
  double x0 = INFINITY, y0 = INFINITY, x1 = -INFINITY, y1 = -INFINITY;
  for (const auto &v : from.vertices())
  {
    x0 = std::min(x0, v.x);
    y0 = std::min(y0, v.y);
    x1 = std::max(x1, v.x);
    y1 = std::max(y1, v.y);
  }
  const auto cells =
    static_cast<int>(std::max(1.0, std::sqrt(static_cast<double>(from.num_triangles()))));
  const double dx = (x1 - x0) / cells, dy = (y1 - y0) / cells;
  auto cell = [&](double x, double lo, double d)
  { return std::clamp(static_cast<int>(std::floor((x - lo) / d)), 0, cells - 1); };
  std::vector<std::vector<int>> buckets(static_cast<std::size_t>(cells * cells));
  for (std::size_t t = 0; t < from.num_triangles(); t++)
  {
    const auto p = from.corners(static_cast<int>(t));
    const double tx0 = std::min({p[0].x, p[1].x, p[2].x}), tx1 = std::max({p[0].x, p[1].x, p[2].x});
    const double ty0 = std::min({p[0].y, p[1].y, p[2].y}), ty1 = std::max({p[0].y, p[1].y, p[2].y});
    for (int i = cell(tx0, x0, dx); i <= cell(tx1, x0, dx); i++)
    {
      for (int j = cell(ty0, y0, dy); j <= cell(ty1, y0, dy); j++)
      {
        buckets[static_cast<std::size_t>(i * cells + j)].push_back(static_cast<int>(t));
      }
    }
  }

  Vector out(to.num_vertices());
  for (std::size_t k = 0; k < to.num_vertices(); k++)
  {
    const Point x = to.point(static_cast<int>(k));
    const auto slot = cell(x.x, x0, dx) * cells + cell(x.y, y0, dy);
    const auto &bucket = buckets[static_cast<std::size_t>(slot)];
    bool found = false;
    for (int t : bucket)
    {
      const auto p = from.corners(t);
      const double area2 = cross(p[1] - p[0], p[2] - p[0]);
      const double l1 = cross(x - p[0], p[2] - p[0]) / area2;
      const double l2 = cross(p[1] - p[0], x - p[0]) / area2;
      const double l0 = 1.0 - l1 - l2;
      const double tol = -1e-10;
      if (l0 >= tol && l1 >= tol && l2 >= tol)
      {
        const auto &v = from.triangles()[t].v;
        out[k] = l0 * vertex_values[v[0]] + l1 * vertex_values[v[1]] + l2 * vertex_values[v[2]];
        found = true;
        break;
      }
    }
    if (!found)
    {
      throw Error("evaluate_p1: vertex " + std::to_string(k) + " lies outside the source mesh");
    }
  }
  return out;
}

SeedSource low_mode_seed(const DomainSpec &domain, int coarse_rounds, const Coefficients &coeffs,
                         int quad_order)
{
  return [=](const Mesh &mesh, const FemSystem &sys, std::size_t n)
  {
    const Mesh coarse = refine_uniform(build_initial_mesh(domain), coarse_rounds);
    const FemSystem coarse_sys = assemble(coarse, coeffs, quad_order);
    if (n >= coarse_sys.n_dofs())
    {
      throw Error("low-mode seed: the coarse mesh has only " +
                  std::to_string(coarse_sys.n_dofs()) + " dofs for N = " + std::to_string(n));
    }
    const ReferencePairs ref = reference_eig(coarse_sys, n);
    std::vector<Vector> seeds;
    for (const auto &v : ref.vectors)
    {
      seeds.push_back(sys.restrict(evaluate_p1(coarse, coarse_sys.expand(v), mesh)));
    }
    return seeds;
  };
}

SeedSource reference_seed()
{
  return [](const Mesh &, const FemSystem &sys, std::size_t n)
  { return reference_eig(sys, n).vectors; };
}

SeedSource random_seed(std::uint64_t seed)
{
  return [seed](const Mesh &, const FemSystem &sys, std::size_t n)
  {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    const MatrixOperator k(sys.stiffness);
    MinresOptions options;
    options.rel_tol = 1e-8;
    std::vector<Vector> seeds(n, Vector(sys.n_dofs()));
    for (auto &v : seeds)
    {
      for (double &x : v)
      {
        x = dist(rng);
      }
      for (int pass = 0; pass < 3; pass++)
      {
        v = minres_solve(k, sys.mass * v, options).x;
        scale(1.0 / mass_norm(sys, v), v);
      }
    }
    return seeds;
  };
}

}  // namespace paro
