// Copyright The paro-afem Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef PARO_DENSE_HPP
#define PARO_DENSE_HPP

#include <cstddef>
#include <span>
#include <vector>
#include "paro/sparse.hpp"

namespace paro
{

// Small row-major dense matrix.
class DenseMatrix
{
public:
  DenseMatrix() = default;
  DenseMatrix(std::size_t rows, std::size_t cols, double value = 0.0)
    : rows_(rows), cols_(cols), data_(rows * cols, value)
  {
  }

  static DenseMatrix identity(std::size_t n);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }

  double &operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

  Vector column(std::size_t j) const;
  DenseMatrix transpose() const;

  // Frobenius norm.
  double norm() const;
  // Largest |A_ij - A_ji|.
  double asymmetry() const;

private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

DenseMatrix operator*(const DenseMatrix &a, const DenseMatrix &b);
DenseMatrix operator-(const DenseMatrix &a, const DenseMatrix &b);

// Lower-triangular L with A = L L^T. Throws if A is not numerically SPD.
DenseMatrix cholesky(const DenseMatrix &a);

// Gaussian elimination with partial pivoting.
Vector lu_solve(DenseMatrix a, Vector b);

struct SymEigen
{
  Vector values;        // Ascending.
  DenseMatrix vectors;  // Column k belongs to values[k].
};

// Cyclic Jacobi rotations until the off-diagonal Frobenius norm drops below
// off_tol * ||A||_F.
SymEigen jacobi_eigen(const DenseMatrix &a, double off_tol = 1e-14);

struct DenseSymPencil
{
  DenseMatrix a;  // Projected stiffness.
  DenseMatrix m;  // Projected mass, SPD.
};

// A V = M V diag(values), V^T M V = I, values ascending.
SymEigen dense_sym_gen_eig(const DenseSymPencil &pencil);

// G_ij = u_i^T S u_j, symmetrized.
DenseMatrix gram(std::span<const Vector> vectors, const SparseSymMatrix &s);

// Modified Gram-Schmidt in the S inner product with one reorthogonalization pass. A vector
// whose remaining S-norm falls below rank_tol times its own input S-norm is reported as
// linearly dependent.
std::vector<Vector> b_orthonormalize(std::span<const Vector> vectors,
                                     const SparseSymMatrix &s, double rank_tol = 1e-12);

// sum_k c_k v_k for each column of coeffs: out[j] = sum_k coeffs(k, j) v[k].
std::vector<Vector> combine(std::span<const Vector> vectors, const DenseMatrix &coeffs);

}  // namespace paro

#endif  // PARO_DENSE_HPP
