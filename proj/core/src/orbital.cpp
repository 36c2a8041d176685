// Copyright The paro-afem Authors
// SPDX-License-Identifier: Apache-2.0

#include "paro/orbital.hpp"

#include <algorithm>
#include <cmath>
#include "paro/dense.hpp"
#include "paro/parallel.hpp"

namespace paro
{

ClusterLayout::ClusterLayout(std::vector<int> multiplicities)
  : multiplicities_(std::move(multiplicities))
{
  offsets_.reserve(multiplicities_.size());
  for (std::size_t i = 0; i < multiplicities_.size(); i++)
  {
    if (multiplicities_[i] < 1)
    {
      throw Error("ClusterLayout: cluster " + std::to_string(i) + " is empty");
    }
    offsets_.push_back(total_);
    total_ += static_cast<std::size_t>(multiplicities_[i]);
    flat_of_cluster_.insert(flat_of_cluster_.end(), multiplicities_[i], i);
  }
}

ClusterLayout cluster_guesses(std::span<const double> values, double rel_gap)
{
  if (values.empty())
  {
    throw Error("cluster_guesses: no values");
  }
  if (!(rel_gap > 0.0))
  {
    throw Error("cluster_guesses: rel_gap must be positive");
  }
  std::vector<int> d{1};
  for (std::size_t k = 1; k < values.size(); k++)
  {
    const double prev = values[k - 1];
    if (values[k] < prev)
    {
      throw Error("cluster_guesses: values are not ascending at index " + std::to_string(k));
    }
    if (values[k] - prev > rel_gap * std::max(1.0, std::abs(prev)))
    {
      d.push_back(1);
    }
    else
    {
      d.back()++;
    }
  }
  return ClusterLayout(std::move(d));
}

Vector compute_shifts(const OrbitalBlock &block)
{
  const auto &layout = block.layout;
  Vector shifts(layout.num_clusters(), 0.0);
  for (std::size_t i = 0; i < layout.num_clusters(); i++)
  {
    const int d = layout.multiplicities()[i];
    for (int j = 0; j < d; j++)
    {
      shifts[i] += block.ritz_values[layout.flat(i, j)];
    }
    shifts[i] /= d;
    // Keep the mean inside the cluster's range despite rounding.
    const auto first = block.ritz_values.begin() + static_cast<std::ptrdiff_t>(layout.offset(i));
    const auto [lo, hi] = std::minmax_element(first, first + d);
    shifts[i] = std::clamp(shifts[i], *lo, *hi);
  }
  return shifts;
}

double safe_shift(double sigma, std::span<const double> ritz_values)
{
  for (double r : ritz_values)
  {
    if (std::abs(sigma - r) < 1e-12 * std::abs(sigma))
    {
      return sigma * (1.0 - 1e-10);
    }
  }
  return sigma;
}

OrbitalUpdate orbital_update(const FemSystem &sys, const OrbitalBlock &block,
                             const ParoTolerances &tols)
{
  const std::size_t n = block.size();
  if (block.layout.size() != n || block.shifts.size() != block.layout.num_clusters())
  {
    throw Error("orbital_update: block layout, vectors and shifts are inconsistent");
  }
  std::vector<double> shifts(n);
  for (std::size_t k = 0; k < n; k++)
  {
    shifts[k] = safe_shift(block.shifts[block.layout.split(k).first], block.ritz_values);
  }

  MinresOptions options;
  options.rel_tol = tols.minres_tol;
  options.max_iter = tols.minres_max_iter;
  options.jacobi = tols.jacobi;

  OrbitalUpdate out;
  out.half_steps.resize(n);
  out.solves.resize(n);
  parallel_for(n, tols.threads,
               [&](std::size_t k)
               {
                 const double sigma = shifts[k];
                 Vector rhs = sys.mass * block.vectors[k];
                 scale(sigma, rhs);
                 if (norm2(rhs) == 0.0)
                 {
                   throw Error("orbital_update: orbital " + std::to_string(k) +
                               " has a zero right-hand side (zero vector or zero shift)");
                 }
                 const ShiftedOperator op(sys.stiffness, sys.mass, sigma);
                 MinresResult r = minres_solve(op, rhs, options);
                 out.half_steps[k] = std::move(r.x);
                 r.x.clear();
                 out.solves[k] = std::move(r);
               });
  return out;
}

OrbitalBlock ritz_step(const FemSystem &sys, std::span<const Vector> half_steps,
                       double rel_gap)
{
  if (half_steps.empty())
  {
    throw Error("ritz_step: no vectors");
  }
  std::vector<Vector> basis;
  try
  {
    basis = b_orthonormalize(half_steps, sys.mass);
  }
  catch (const Error &e)
  {
    throw Error(std::string("ritz_step: subspace is rank deficient; try a smaller minres_tol "
                            "or perturbed initial data (") +
                e.what() + ")");
  }
  const DenseSymPencil pencil{gram(basis, sys.stiffness), gram(basis, sys.mass)};
  const SymEigen eig = dense_sym_gen_eig(pencil);

  OrbitalBlock block;
  block.vectors = combine(basis, eig.vectors);
  block.ritz_values = eig.values;
  block.layout = cluster_guesses(block.ritz_values, rel_gap);
  block.shifts = compute_shifts(block);
  return block;
}

double relative_eigenvalue_change(std::span<const double> updated,
                                  std::span<const double> previous)
{
  if (updated.size() != previous.size())
  {
    throw Error("relative_eigenvalue_change: sizes differ");
  }
  double num = 0.0, den = 0.0;
  for (std::size_t k = 0; k < updated.size(); k++)
  {
    num += std::abs(updated[k] - previous[k]);
    den += std::abs(previous[k]);
  }
  if (den == 0.0)
  {
    return num == 0.0 ? 0.0 : INFINITY;
  }
  return num / den;
}

InnerResult paro_inner_loop(const FemSystem &sys, const OrbitalBlock &block0,
                            const ParoTolerances &tols, const InnerStop &stop)
{
  if (block0.size() == 0 || block0.ritz_values.size() != block0.size())
  {
    throw Error("paro_inner_loop: initial block needs vectors and Ritz values");
  }
  InnerResult result;
  result.block = block0;
  if (result.block.shifts.size() != result.block.layout.num_clusters() ||
      result.block.layout.size() != result.block.size())
  {
    result.block.layout = cluster_guesses(result.block.ritz_values, tols.rel_gap);
    result.block.shifts = compute_shifts(result.block);
  }

  for (int m = 0; m < tols.max_inner; m++)
  {
    OrbitalUpdate update = orbital_update(sys, result.block, tols);
    for (const auto &s : update.solves)
    {
      result.minres_iterations += s.iterations;
    }
    OrbitalBlock next = ritz_step(sys, update.half_steps, tols.rel_gap);
    const double delta2 = relative_eigenvalue_change(next.ritz_values, result.block.ritz_values);
    result.delta2_history.push_back(delta2);
    result.block = std::move(next);
    result.m_used = m + 1;
    if (delta2 <= tols.tol2 || (stop && stop(result.block, delta2)))
    {
      result.converged = true;
      break;
    }
  }
  return result;
}

}  // namespace paro
