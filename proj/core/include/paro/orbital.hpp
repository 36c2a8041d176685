// Copyright The paro-afem Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef PARO_ORBITAL_HPP
#define PARO_ORBITAL_HPP

#include <cstddef>
#include <functional>
#include <span>
#include <utility>
#include <vector>
#include "paro/assembly.hpp"
#include "paro/minres.hpp"

namespace paro
{

// Grouping of N ascending values into q clusters of sizes d_1..d_q. Flat index k runs over
// (i, j) in lexicographic order.
class ClusterLayout
{
public:
  ClusterLayout() = default;
  explicit ClusterLayout(std::vector<int> multiplicities);

  std::size_t num_clusters() const { return multiplicities_.size(); }
  std::size_t size() const { return total_; }
  const std::vector<int> &multiplicities() const { return multiplicities_; }

  // First flat index of cluster i.
  std::size_t offset(std::size_t i) const { return offsets_[i]; }
  std::size_t flat(std::size_t i, std::size_t j) const { return offsets_[i] + j; }
  // (cluster, position within cluster) of flat index k.
  std::pair<std::size_t, std::size_t> split(std::size_t k) const
  {
    const std::size_t i = flat_of_cluster_[k];
    return {i, k - offsets_[i]};
  }

  bool operator==(const ClusterLayout &) const = default;

private:
  std::vector<int> multiplicities_;
  std::vector<std::size_t> offsets_;
  std::vector<std::size_t> flat_of_cluster_;
  std::size_t total_ = 0;
};

// A new cluster starts at k when values[k] - values[k-1] > rel_gap * max(1, |values[k-1]|).
ClusterLayout cluster_guesses(std::span<const double> values, double rel_gap);

struct OrbitalBlock
{
  ClusterLayout layout;
  std::vector<Vector> vectors;  // Free-dof coefficients, b-orthonormal after a Ritz step.
  Vector ritz_values;           // Ascending in flat order.
  Vector shifts;                // One per cluster.

  std::size_t size() const { return vectors.size(); }
};

struct ParoTolerances
{
  double tol2 = 1e-10;
  int max_inner = 50;
  double minres_tol = 1e-10;
  std::size_t minres_max_iter = 0;  // 0 = 4 * n_dofs.
  bool jacobi = false;
  double rel_gap = 0.02;
  std::size_t threads = 0;  // 0 = hardware concurrency.

  bool operator==(const ParoTolerances &) const = default;
};

// Arithmetic mean of each cluster's Ritz values.
Vector compute_shifts(const OrbitalBlock &block);

// sigma nudged by a relative 1e-10 when it coincides (to 1e-12 relative) with a Ritz value.
double safe_shift(double sigma, std::span<const double> ritz_values);

struct OrbitalUpdate
{
  std::vector<Vector> half_steps;
  std::vector<MinresResult> solves;  // x fields are moved into half_steps.
};

// Solves (K - s_i M) x = s_i M u_ij for every orbital, concurrently.
OrbitalUpdate orbital_update(const FemSystem &sys, const OrbitalBlock &block,
                             const ParoTolerances &tols);

// Rayleigh-Ritz on span(half_steps); the result is b-orthonormal with ascending Ritz values,
// a fresh layout from cluster_guesses and shifts from compute_shifts.
OrbitalBlock ritz_step(const FemSystem &sys, std::span<const Vector> half_steps,
                       double rel_gap);

// sum_k |new_k - old_k| / sum_k |old_k|
double relative_eigenvalue_change(std::span<const double> updated,
                                  std::span<const double> previous);

struct InnerResult
{
  OrbitalBlock block;
  int m_used = 0;
  std::vector<double> delta2_history;
  std::size_t minres_iterations = 0;
  bool converged = false;  // Delta_2 <= tol2 (or the early stop fired).
};

// Optional extra stopping rule evaluated after each iteration with the new block and its
// Delta_2; returning true ends the loop.
using InnerStop = std::function<bool(const OrbitalBlock &, double)>;

// orbital_update -> ritz_step -> compute_shifts until Delta_2 <= tol2 or max_inner.
InnerResult paro_inner_loop(const FemSystem &sys, const OrbitalBlock &block0,
                            const ParoTolerances &tols, const InnerStop &stop = {});

}  // namespace paro

#endif  // PARO_ORBITAL_HPP
