// Copyright The paro-afem Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef PARO_VERIFY_HPP
#define PARO_VERIFY_HPP

#include <cstdint>
#include <span>
#include <utility>
#include <vector>
#include "paro/assembly.hpp"
#include "paro/mesh.hpp"
#include "paro/orbital.hpp"

namespace paro
{

struct ReferencePairs
{
  Vector values;                // Ascending.
  std::vector<Vector> vectors;  // M-orthonormal.
  Vector residuals;             // ||K v - lambda M v|| / (||K||_inf ||v||).
  int iterations = 0;
};

struct ReferenceOptions
{
  double tol = 1e-11;
  int max_iter = 500;
  std::uint64_t seed = 12345;
  // Extra block columns beyond N that absorb slow convergence at the top of the wanted set.
  std::size_t guard = 0;  // 0 = max(4, N).
};

// Smallest N eigenpairs of K v = lambda M v by block inverse iteration with Rayleigh-Ritz and
// locking of converged pairs (sparse LDL^T of K). A dense solve is used when the block
// would cover at least half of the space.
ReferencePairs reference_eig(const FemSystem &sys, std::size_t n,
                             const ReferenceOptions &options = {});
// Same, from an explicit start block (at least N columns).
ReferencePairs reference_eig(const FemSystem &sys, std::size_t n,
                             std::span<const Vector> start, const ReferenceOptions &options = {});

// sup over unit-energy x in span(X) of the energy distance to span(Y), in [0, 1].
double dist_a(const FemSystem &sys, std::span<const Vector> x, std::span<const Vector> y);

// a-orthogonal projection of v onto span(Y).
Vector project_a(const FemSystem &sys, std::span<const double> v, std::span<const Vector> y);

struct AnalyticSpectrum
{
  Vector values;
  std::vector<int> multiplicities;
  std::vector<std::pair<int, int>> modes;  // (m, n) of each value.
};

// pi^2 (m^2 + n^2) for the Dirichlet Laplacian on the unit square. Throws for other domains.
AnalyticSpectrum analytic_spectrum(const DomainSpec &domain, std::size_t count);

// Nodal interpolant of sin(m pi x) sin(n pi y) on the free dofs, b-normalized.
Vector sample_unit_square_mode(const Mesh &mesh, const FemSystem &sys, int m, int n);

// dist_a of span{sin(m pi x) sin(n pi y)} over the given modes to the discrete space V^h
// (Laplacian on the unit square), from the Ritz projections of the exact eigenfunctions.
double analytic_subspace_distance(const Mesh &mesh, const FemSystem &sys,
                                  std::span<const std::pair<int, int>> modes);

struct RateFit
{
  double slope = 0.0;
  double intercept = 0.0;
  double r_squared = 0.0;
};

// Least squares line through (log x, log y).
RateFit fit_rate(std::span<const double> x, std::span<const double> y);
// Least squares line through (x, log y).
RateFit fit_semilog(std::span<const double> x, std::span<const double> y);

struct ClusterReport
{
  double dist_a = 0.0;
  double max_eigenvalue_gap = 0.0;
  // Procrustes-matched per-vector distances and the bound they must satisfy.
  Vector matched_distances;
  double bound = 0.0;
  bool bound_holds = true;
};

struct QuasiOrthogonalityReport
{
  std::vector<ClusterReport> clusters;
  double g = 0.0;      // Smallest gap between consecutive reference clusters.
  double gamma = 0.0;  // Largest reference spread within a cluster.
  bool all_bounds_hold = true;
};

// Compares each cluster of the block with the matching reference cluster (same flat ranges
// under `layout`). ref may carry more values than the block; the extra value then enters g.
QuasiOrthogonalityReport quasi_orthogonality_report(const FemSystem &sys,
                                                    const OrbitalBlock &block,
                                                    const ReferencePairs &ref,
                                                    const ClusterLayout &layout);

// Right-hand side of the basis-matching bound (1 + sqrt(d)) sqrt(2 - 2 sqrt(1 - dist^2)).
double matched_basis_bound(std::size_t d, double dist);

}  // namespace paro

#endif  // PARO_VERIFY_HPP
