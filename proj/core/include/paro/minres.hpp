// Copyright The paro-afem Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef PARO_MINRES_HPP
#define PARO_MINRES_HPP

#include <cstddef>
#include <span>
#include <vector>
#include "paro/sparse.hpp"

namespace paro
{

// Symmetric operator applied matrix-free.
class SymOperator
{
public:
  virtual ~SymOperator() = default;
  virtual std::size_t dim() const = 0;
  virtual void apply(std::span<const double> x, std::span<double> y) const = 0;
  // Diagonal of the operator, used for Jacobi preconditioning.
  virtual Vector diagonal() const = 0;
};

class MatrixOperator final : public SymOperator
{
public:
  explicit MatrixOperator(const SparseSymMatrix &a) : a_(a) {}
  std::size_t dim() const override { return a_.dim(); }
  void apply(std::span<const double> x, std::span<double> y) const override;
  Vector diagonal() const override { return a_.diagonal_entries(); }

private:
  const SparseSymMatrix &a_;
};

// K - shift * M, applied as K x - shift * (M x); never formed explicitly.
class ShiftedOperator final : public SymOperator
{
public:
  ShiftedOperator(const SparseSymMatrix &k, const SparseSymMatrix &m, double shift);
  std::size_t dim() const override { return k_.dim(); }
  void apply(std::span<const double> x, std::span<double> y) const override;
  Vector diagonal() const override;
  double shift() const { return shift_; }

private:
  const SparseSymMatrix &k_;
  const SparseSymMatrix &m_;
  double shift_;
};

struct MinresOptions
{
  double rel_tol = 1e-10;
  // 0 selects 4 * dim.
  std::size_t max_iter = 0;
  bool jacobi = false;
};

enum class MinresStatus
{
  Converged,
  MaxIterations,
  Breakdown,
  ZeroRhs
};

struct MinresResult
{
  Vector x;
  std::size_t iterations = 0;
  // True relative residual ||b - A x|| / ||b|| of the returned iterate.
  double rel_residual = 0.0;
  MinresStatus status = MinresStatus::Converged;
  // Recurrence estimate of the (preconditioned) relative residual after each iteration;
  // nonincreasing by construction.
  std::vector<double> residual_history;
};

// Preconditioned MINRES (Paige-Saunders) for symmetric, possibly indefinite systems.
// Jacobi preconditioning uses |diag| so the preconditioner stays SPD.
MinresResult minres_solve(const SymOperator &op, std::span<const double> rhs,
                          const MinresOptions &options = {});

}  // namespace paro

#endif  // PARO_MINRES_HPP
