// Copyright The paro-afem Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef PARO_IO_HPP
#define PARO_IO_HPP

#include <iosfwd>
#include <span>
#include <string>
#include <vector>
#include "paro/adapt.hpp"
#include "paro/format.hpp"

namespace paro
{

// One row per level:
//   n,n_dofs,n_elements,global_estimator_sq,m_used,minres_iterations,delta1,multiplicities,
//   lambda_1,...,lambda_N
// multiplicities is ';'-separated. delta1 is empty on the first level.
void write_history_csv(std::ostream &os, std::span<const RunEntry> entries);

// "n,wall_time" per level, kept apart from the history so that file is reproducible.
void write_timing_csv(std::ostream &os, std::span<const RunEntry> entries);

// Line 1: n_dofs; then n_dofs values per orbital, one per line, orbital after orbital.
void write_vectors(std::ostream &os, std::span<const Vector> vectors, std::size_t n_dofs);
std::vector<Vector> read_vectors(std::istream &is);

struct VerifyRow
{
  int n = 0;
  std::size_t n_dofs = 0;
  std::size_t cluster = 0;
  int multiplicity = 0;
  double dist_a = 0.0;
  Vector eigenvalue_gaps;  // |lambda^h - lambda^(n)| per pair of the cluster.
  bool matched_bound_holds = true;
  double estimator_ratio = 0.0;  // eta_tilde / eta for the whole block at this level.
};

// n,n_dofs,cluster,multiplicity,dist_a,eigenvalue_gaps,matched_bound_holds,estimator_ratio
void write_verify_csv(std::ostream &os, std::span<const VerifyRow> rows);

}  // namespace paro

#endif  // PARO_IO_HPP
