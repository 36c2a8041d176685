// Copyright The paro-afem Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef PARO_ADAPT_HPP
#define PARO_ADAPT_HPP

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>
#include "paro/assembly.hpp"
#include "paro/estimator.hpp"
#include "paro/mesh.hpp"
#include "paro/orbital.hpp"

namespace paro
{

struct AdaptConfig
{
  double theta = 0.5;
  int ell = 1;
  double tol1 = 1e-4;
  int max_refinements = 20;
  ParoTolerances paro;
  // Also end the inner loop once Delta_2 < budget_factor * eta / sum |lambda|.
  bool estimator_matched_stop = false;
  double budget_factor = 0.1;
  // Stop refining once the dof count exceeds this (0 = no limit).
  std::size_t max_dofs = 0;
  int quad_order = 2;

  // Throws Error describing the first out-of-range field.
  void validate() const;

  bool operator==(const AdaptConfig &) const = default;
};

// Greedy minimal Doerfler set: largest indicators first (ties to the lower index) until the
// accumulated sum reaches theta * global_sq.
std::vector<int> dorfler_mark(const Indicators &indicators, double theta);

struct RunEntry
{
  int n = 0;  // Refinement level.
  std::size_t n_dofs = 0;
  std::size_t n_elements = 0;
  Vector ritz_values;
  std::vector<int> multiplicities;
  double global_estimator_sq = 0.0;
  int m_used = 0;
  std::size_t minres_iterations = 0;
  double delta1 = 0.0;  // NaN on the first level.
  double wall_time = 0.0;
};

enum class StopReason
{
  Converged,        // Delta_1 <= tol1 or nothing left to mark.
  MaxRefinements,
  MaxDofs
};

struct AdaptResult
{
  std::vector<RunEntry> entries;
  OrbitalBlock block;
  Mesh mesh;
  FemSystem system;
  StopReason reason = StopReason::MaxRefinements;
};

// Thrown when a level fails; carries the history recorded up to that point.
class AdaptFailure : public Error
{
public:
  AdaptFailure(const std::string &what, std::vector<RunEntry> entries)
    : Error(what), entries(std::move(entries))
  {
  }
  std::vector<RunEntry> entries;
};

// Initial orbitals (free-dof vectors on `sys`) for the first mesh.
using SeedSource =
  std::function<std::vector<Vector>(const Mesh &mesh, const FemSystem &sys, std::size_t n)>;

// Called after the inner loop and estimate of every level.
using LevelObserver = std::function<void(const RunEntry &entry, const Mesh &mesh,
                                         const FemSystem &sys, const OrbitalBlock &block,
                                         const Indicators &indicators)>;

AdaptResult adaptive_solve(const Mesh &initial, const Coefficients &coeffs, std::size_t n,
                           const AdaptConfig &config, const SeedSource &seed,
                           const LevelObserver &observer = {});

// Reference eigenvectors of a coarse uniform mesh of `domain` (coarse_rounds bisection
// rounds), interpolated to the mesh of the run, which must be a refinement of it.
SeedSource low_mode_seed(const DomainSpec &domain, int coarse_rounds,
                         const Coefficients &coeffs, int quad_order = 2);
// Reference eigenvectors of the initial mesh itself.
SeedSource reference_seed();
// Uniform random vectors smoothed by three applications of K^{-1} M.
SeedSource random_seed(std::uint64_t seed);

// Values of a P1 function on `from` (per-vertex) at the vertices of `to`, by point location.
// Every vertex of `to` must lie in the closure of some triangle of `from`.
Vector evaluate_p1(const Mesh &from, std::span<const double> vertex_values, const Mesh &to);

}  // namespace paro

#endif  // PARO_ADAPT_HPP
