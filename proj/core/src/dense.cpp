// Copyright The paro-afem Authors
// SPDX-License-Identifier: Apache-2.0

#include "paro/dense.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace paro
{

DenseMatrix DenseMatrix::identity(std::size_t n)
{
  DenseMatrix a(n, n);
  for (std::size_t i = 0; i < n; i++)
  {
    a(i, i) = 1.0;
  }
  return a;
}

Vector DenseMatrix::column(std::size_t j) const
{
  Vector c(rows_);
  for (std::size_t i = 0; i < rows_; i++)
  {
    c[i] = (*this)(i, j);
  }
  return c;
}

DenseMatrix DenseMatrix::transpose() const
{
  DenseMatrix t(cols_, rows_);
  for (std::size_t i = 0; i < rows_; i++)
  {
    for (std::size_t j = 0; j < cols_; j++)
    {
      t(j, i) = (*this)(i, j);
    }
  }
  return t;
}

double DenseMatrix::norm() const
{
  return std::sqrt(std::inner_product(data_.begin(), data_.end(), data_.begin(), 0.0));
}

double DenseMatrix::asymmetry() const
{
  double worst = 0.0;
  for (std::size_t i = 0; i < rows_; i++)
  {
    for (std::size_t j = 0; j < i; j++)
    {
      worst = std::max(worst, std::abs((*this)(i, j) - (*this)(j, i)));
    }
  }
  return worst;
}

DenseMatrix operator*(const DenseMatrix &a, const DenseMatrix &b)
{
  if (a.cols() != b.rows())
  {
    throw Error("DenseMatrix product: inner dimensions differ");
  }
  DenseMatrix c(a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); i++)
  {
    for (std::size_t k = 0; k < a.cols(); k++)
    {
      const double aik = a(i, k);
      for (std::size_t j = 0; j < b.cols(); j++)
      {
        c(i, j) += aik * b(k, j);
      }
    }
  }
  return c;
}

DenseMatrix operator-(const DenseMatrix &a, const DenseMatrix &b)
{
  DenseMatrix c = a;
  for (std::size_t i = 0; i < a.rows(); i++)
  {
    for (std::size_t j = 0; j < a.cols(); j++)
    {
      c(i, j) -= b(i, j);
    }
  }
  return c;
}

DenseMatrix cholesky(const DenseMatrix &a)
{
  const std::size_t n = a.rows();
  DenseMatrix l(n, n);
  for (std::size_t j = 0; j < n; j++)
  {
    double d = a(j, j);
    for (std::size_t k = 0; k < j; k++)
    {
      d -= l(j, k) * l(j, k);
    }
    if (!(d > 0.0))
    {
      throw Error("cholesky: matrix is not positive definite (pivot " + std::to_string(j) +
                  " is " + std::to_string(d) + ")");
    }
    l(j, j) = std::sqrt(d);
    for (std::size_t i = j + 1; i < n; i++)
    {
      double s = a(i, j);
      for (std::size_t k = 0; k < j; k++)
      {
        s -= l(i, k) * l(j, k);
      }
      l(i, j) = s / l(j, j);
    }
  }
  return l;
}

Vector lu_solve(DenseMatrix a, Vector b)
{
  const std::size_t n = a.rows();
  for (std::size_t k = 0; k < n; k++)
  {
    std::size_t p = k;
    for (std::size_t i = k + 1; i < n; i++)
    {
      if (std::abs(a(i, k)) > std::abs(a(p, k)))
      {
        p = i;
      }
    }
    if (a(p, k) == 0.0)
    {
      throw Error("lu_solve: matrix is singular");
    }
    if (p != k)
    {
      for (std::size_t j = 0; j < n; j++)
      {
        std::swap(a(k, j), a(p, j));
      }
      std::swap(b[k], b[p]);
    }
    for (std::size_t i = k + 1; i < n; i++)
    {
      const double f = a(i, k) / a(k, k);
      for (std::size_t j = k; j < n; j++)
      {
        a(i, j) -= f * a(k, j);
      }
      b[i] -= f * b[k];
    }
  }
  for (std::size_t k = n; k-- > 0;)
  {
    double s = b[k];
    for (std::size_t j = k + 1; j < n; j++)
    {
      s -= a(k, j) * b[j];
    }
    b[k] = s / a(k, k);
  }
  return b;
}

SymEigen jacobi_eigen(const DenseMatrix &input, double off_tol)
{
  const std::size_t n = input.rows();
  DenseMatrix a = input;
  for (std::size_t i = 0; i < n; i++)
  {
    for (std::size_t j = 0; j < i; j++)
    {
      const double s = 0.5 * (a(i, j) + a(j, i));
      a(i, j) = a(j, i) = s;
    }
  }
  DenseMatrix v = DenseMatrix::identity(n);
  const double scale = a.norm();
  auto off_norm = [&]()
  {
    double s = 0.0;
    for (std::size_t i = 0; i < n; i++)
    {
      for (std::size_t j = 0; j < i; j++)
      {
        s += 2.0 * a(i, j) * a(i, j);
      }
    }
    return std::sqrt(s);
  };

  constexpr int max_sweeps = 100;
  for (int sweep = 0; sweep < max_sweeps && off_norm() > off_tol * scale; sweep++)
  {
    for (std::size_t p = 0; p + 1 < n; p++)
    {
      for (std::size_t q = p + 1; q < n; q++)
      {
        const double apq = a(p, q);
        if (apq == 0.0)
        {
          continue;
        }
        const double tau = (a(q, q) - a(p, p)) / (2.0 * apq);
        const double t = (tau >= 0.0 ? 1.0 : -1.0) / (std::abs(tau) + std::hypot(1.0, tau));
        const double c = 1.0 / std::hypot(1.0, t);
        const double s = t * c;
        for (std::size_t k = 0; k < n; k++)
        {
          const double akp = a(k, p), akq = a(k, q);
          a(k, p) = c * akp - s * akq;
          a(k, q) = s * akp + c * akq;
        }
        for (std::size_t k = 0; k < n; k++)
        {
          const double apk = a(p, k), aqk = a(q, k);
          a(p, k) = c * apk - s * aqk;
          a(q, k) = s * apk + c * aqk;
        }
        for (std::size_t k = 0; k < n; k++)
        {
          const double vkp = v(k, p), vkq = v(k, q);
          v(k, p) = c * vkp - s * vkq;
          v(k, q) = s * vkp + c * vkq;
        }
      }
    }
  }

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t i, std::size_t j) { return a(i, i) < a(j, j); });
  SymEigen result{Vector(n), DenseMatrix(n, n)};
  for (std::size_t k = 0; k < n; k++)
  {
    result.values[k] = a(order[k], order[k]);
    for (std::size_t i = 0; i < n; i++)
    {
      result.vectors(i, k) = v(i, order[k]);
    }
  }
  return result;
}

SymEigen dense_sym_gen_eig(const DenseSymPencil &pencil)
{
  const std::size_t n = pencil.a.rows();
  if (pencil.a.cols() != n || pencil.m.rows() != n || pencil.m.cols() != n)
  {
    throw Error("dense_sym_gen_eig: pencil matrices must be square and of equal size");
  }
  const DenseMatrix l = cholesky(pencil.m);

  // C = L^{-1} A L^{-T}, via forward substitution on columns then rows.
  DenseMatrix y(n, n);  // y = L^{-1} A
  for (std::size_t j = 0; j < n; j++)
  {
    for (std::size_t i = 0; i < n; i++)
    {
      double s = pencil.a(i, j);
      for (std::size_t k = 0; k < i; k++)
      {
        s -= l(i, k) * y(k, j);
      }
      y(i, j) = s / l(i, i);
    }
  }
  DenseMatrix c(n, n);  // c = y L^{-T}, i.e. c^T = L^{-1} y^T
  for (std::size_t r = 0; r < n; r++)
  {
    for (std::size_t i = 0; i < n; i++)
    {
      double s = y(r, i);
      for (std::size_t k = 0; k < i; k++)
      {
        s -= l(i, k) * c(r, k);
      }
      c(r, i) = s / l(i, i);
    }
  }

  SymEigen standard = jacobi_eigen(c);

  // V = L^{-T} W
  DenseMatrix v(n, n);
  for (std::size_t j = 0; j < n; j++)
  {
    for (std::size_t i = n; i-- > 0;)
    {
      double s = standard.vectors(i, j);
      for (std::size_t k = i + 1; k < n; k++)
      {
        s -= l(k, i) * v(k, j);
      }
      v(i, j) = s / l(i, i);
    }
  }
  standard.vectors = std::move(v);
  return standard;
}

DenseMatrix gram(std::span<const Vector> vectors, const SparseSymMatrix &s)
{
  const std::size_t n = vectors.size();
  std::vector<Vector> sv;
  sv.reserve(n);
  for (const auto &u : vectors)
  {
    if (u.size() != s.dim())
    {
      throw Error("gram: vector length " + std::to_string(u.size()) +
                  " differs from matrix dimension " + std::to_string(s.dim()));
    }
    sv.push_back(s * u);
  }
  DenseMatrix g(n, n);
  for (std::size_t i = 0; i < n; i++)
  {
    for (std::size_t j = 0; j <= i; j++)
    {
      const double v = 0.5 * (dot(vectors[i], sv[j]) + dot(vectors[j], sv[i]));
      g(i, j) = g(j, i) = v;
    }
  }
  return g;
}

std::vector<Vector> b_orthonormalize(std::span<const Vector> vectors,
                                     const SparseSymMatrix &s, double rank_tol)
{
  std::vector<Vector> q;
  std::vector<Vector> sq;
  q.reserve(vectors.size());
  sq.reserve(vectors.size());
  for (std::size_t k = 0; k < vectors.size(); k++)
  {
    Vector u = vectors[k];
    if (u.size() != s.dim())
    {
      throw Error("b_orthonormalize: vector " + std::to_string(k) + " has wrong length");
    }
    const double norm0 = std::sqrt(std::max(inner(s, u, u), 0.0));
    if (!(norm0 > 0.0) || !std::isfinite(norm0))
    {
      throw Error("b_orthonormalize: vector " + std::to_string(k) +
                  " has zero or non-finite norm");
    }
    scale(1.0 / norm0, u);
    for (int pass = 0; pass < 2; pass++)
    {
      for (std::size_t j = 0; j < q.size(); j++)
      {
        axpy(-dot(sq[j], u), q[j], u);
      }
    }
    Vector su = s * u;
    const double norm = std::sqrt(std::max(dot(u, su), 0.0));
    if (norm < rank_tol)
    {
      throw Error("b_orthonormalize: vector " + std::to_string(k) +
                  " is numerically dependent on the preceding vectors (relative pivot " +
                  std::to_string(norm) + ")");
    }
    scale(1.0 / norm, u);
    scale(1.0 / norm, su);
    q.push_back(std::move(u));
    sq.push_back(std::move(su));
  }
  return q;
}

std::vector<Vector> combine(std::span<const Vector> vectors, const DenseMatrix &coeffs)
{
  if (coeffs.rows() != vectors.size())
  {
    throw Error("combine: coefficient rows do not match the number of vectors");
  }
  const std::size_t n = vectors.empty() ? 0 : vectors[0].size();
  std::vector<Vector> out(coeffs.cols(), Vector(n, 0.0));
  for (std::size_t j = 0; j < coeffs.cols(); j++)
  {
    for (std::size_t k = 0; k < vectors.size(); k++)
    {
      axpy(coeffs(k, j), vectors[k], out[j]);
    }
  }
  return out;
}

}  // namespace paro
