// Copyright The paro-afem Authors
// SPDX-License-Identifier: Apache-2.0

#include "paro/minres.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace paro
{

void MatrixOperator::apply(std::span<const double> x, std::span<double> y) const
{
  a_.multiply(x, y);
}

ShiftedOperator::ShiftedOperator(const SparseSymMatrix &k, const SparseSymMatrix &m,
                                 double shift)
  : k_(k), m_(m), shift_(shift)
{
  if (k.dim() != m.dim())
  {
    throw Error("ShiftedOperator: stiffness and mass dimensions differ");
  }
}

void ShiftedOperator::apply(std::span<const double> x, std::span<double> y) const
{
  k_.multiply(x, y);
  if (shift_ != 0.0)
  {
    Vector mx(x.size());
    m_.multiply(x, mx);
    axpy(-shift_, mx, y);
  }
}

Vector ShiftedOperator::diagonal() const
{
  Vector d = k_.diagonal_entries();
  const Vector dm = m_.diagonal_entries();
  axpy(-shift_, dm, d);
  return d;
}

MinresResult minres_solve(const SymOperator &op, std::span<const double> rhs,
                          const MinresOptions &options)
{
  const std::size_t n = op.dim();
  if (rhs.size() != n)
  {
    throw Error("minres_solve: rhs has " + std::to_string(rhs.size()) +
                " entries, operator dimension is " + std::to_string(n));
  }
  for (double v : rhs)
  {
    if (!std::isfinite(v))
    {
      throw Error("minres_solve: rhs is not finite");
    }
  }

  MinresResult result;
  result.x.assign(n, 0.0);
  const double rhs_norm = norm2(rhs);
  if (rhs_norm == 0.0)
  {
    result.status = MinresStatus::ZeroRhs;
    return result;
  }

  Vector inv_diag;
  if (options.jacobi)
  {
    inv_diag = op.diagonal();
    double scale_ref = 0.0;
    for (double d : inv_diag)
    {
      scale_ref = std::max(scale_ref, std::abs(d));
    }
    for (double &d : inv_diag)
    {
      d = 1.0 / std::max(std::abs(d), 1e-14 * scale_ref);
    }
  }
  auto precondition = [&](std::span<const double> r, std::span<double> z)
  {
    if (inv_diag.empty())
    {
      std::copy(r.begin(), r.end(), z.begin());
      return;
    }
    for (std::size_t i = 0; i < n; i++)
    {
      z[i] = inv_diag[i] * r[i];
    }
  };

  const std::size_t max_iter = options.max_iter > 0 ? options.max_iter : 4 * n;
  const double eps = std::numeric_limits<double>::epsilon();

  Vector r1(rhs.begin(), rhs.end());
  Vector y(n);
  precondition(r1, y);
  const double beta1 = std::sqrt(dot(r1, y));
  Vector r2 = r1;
  Vector v(n), w(n, 0.0), w1(n), w2(n, 0.0);

  double oldb = 0.0, beta = beta1, dbar = 0.0, epsln = 0.0, phibar = beta1;
  double cs = -1.0, sn = 0.0;
  result.status = MinresStatus::MaxIterations;

  for (std::size_t itn = 1; itn <= max_iter; itn++)
  {
    const double s = 1.0 / beta;
    for (std::size_t i = 0; i < n; i++)
    {
      v[i] = s * y[i];
    }
    op.apply(v, y);
    if (itn >= 2)
    {
      axpy(-beta / oldb, r1, y);
    }
    const double alfa = dot(v, y);
    axpy(-alfa / beta, r2, y);
    std::swap(r1, r2);
    r2 = y;
    precondition(r2, y);
    oldb = beta;
    const double beta_sq = dot(r2, y);
    beta = std::sqrt(std::max(beta_sq, 0.0));

    const double oldeps = epsln;
    const double delta = cs * dbar + sn * alfa;
    const double gbar = sn * dbar - cs * alfa;
    epsln = sn * beta;
    dbar = -cs * beta;
    const double gamma = std::max(std::hypot(gbar, beta), eps);
    cs = gbar / gamma;
    sn = beta / gamma;
    const double phi = cs * phibar;
    phibar = sn * phibar;

    std::swap(w1, w2);  // w1 <- old w2
    std::swap(w2, w);   // w2 <- old w
    for (std::size_t i = 0; i < n; i++)
    {
      w[i] = (v[i] - oldeps * w1[i] - delta * w2[i]) / gamma;
      result.x[i] += phi * w[i];
    }

    result.iterations = itn;
    const double rel = phibar / beta1;
    result.residual_history.push_back(rel);
    if (rel <= options.rel_tol)
    {
      result.status = MinresStatus::Converged;
      break;
    }
    if (beta <= eps * beta1 * 1e-4)
    {
      // Invariant Krylov subspace: the iterate is as good as this space allows.
      result.status = MinresStatus::Breakdown;
      break;
    }
  }

  Vector ax(n);
  op.apply(result.x, ax);
  for (std::size_t i = 0; i < n; i++)
  {
    ax[i] = rhs[i] - ax[i];
  }
  result.rel_residual = norm2(ax) / rhs_norm;
  return result;
}

}  // namespace paro
