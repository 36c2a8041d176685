// Copyright The paro-afem Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef PARO_SPARSE_HPP
#define PARO_SPARSE_HPP

#include <cstddef>
#include <iosfwd>
#include <span>
#include <vector>
#include "paro/types.hpp"

namespace paro
{

struct Triplet
{
  int row = 0;
  int col = 0;
  double value = 0.0;
};

//
// Symmetric matrix in compressed sparse row format storing only the lower triangle
// (col <= row). Column indices are sorted within each row and exact zeros are dropped.
//
class SparseSymMatrix
{
public:
  SparseSymMatrix() = default;

  // Duplicates are summed. Entries above the diagonal are folded onto their mirror, so each
  // off-diagonal pair must be passed once (from either half).
  static SparseSymMatrix from_triplets(std::size_t n, std::span<const Triplet> triplets);
  static SparseSymMatrix identity(std::size_t n);
  static SparseSymMatrix diagonal(std::span<const double> d);

  std::size_t dim() const { return n_; }
  std::size_t stored_nonzeros() const { return values_.size(); }

  // y = A x. Safe to call concurrently on a shared matrix.
  void multiply(std::span<const double> x, std::span<double> y) const;
  Vector operator*(std::span<const double> x) const;

  double at(std::size_t i, std::size_t j) const;
  Vector diagonal_entries() const;

  // Maximum absolute row sum of the full symmetric matrix (bounds the 2-norm).
  double norm_inf() const;

  const std::vector<std::size_t> &row_ptr() const { return row_ptr_; }
  const std::vector<int> &col_idx() const { return col_idx_; }
  const std::vector<double> &values() const { return values_; }

  // Symmetric submatrix on the given (sorted) index set.
  SparseSymMatrix restrict_to(std::span<const int> keep) const;

private:
  std::size_t n_ = 0;
  std::vector<std::size_t> row_ptr_{0};
  std::vector<int> col_idx_;
  std::vector<double> values_;
};

// Coordinate text, one "i j value" line per stored (lower-triangle) entry.
void write_coordinate(std::ostream &os, const SparseSymMatrix &a);

double dot(std::span<const double> x, std::span<const double> y);
double norm2(std::span<const double> x);
void axpy(double alpha, std::span<const double> x, std::span<double> y);
void scale(double alpha, std::span<double> x);

// u^T S v
double inner(const SparseSymMatrix &s, std::span<const double> u, std::span<const double> v);

}  // namespace paro

#endif  // PARO_SPARSE_HPP
