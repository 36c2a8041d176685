// Copyright The paro-afem Authors
// SPDX-License-Identifier: Apache-2.0

#include "paro/sparse.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

namespace paro
{

SparseSymMatrix SparseSymMatrix::from_triplets(std::size_t n,
                                               std::span<const Triplet> triplets)
{
  std::vector<Triplet> lower;
  lower.reserve(triplets.size());
  for (const auto &t : triplets)
  {
    if (t.row < 0 || t.col < 0 || static_cast<std::size_t>(t.row) >= n ||
        static_cast<std::size_t>(t.col) >= n)
    {
      throw Error("sparse triplet (" + std::to_string(t.row) + ", " +
                  std::to_string(t.col) + ") outside a " + std::to_string(n) + "x" +
                  std::to_string(n) + " matrix");
    }
    lower.push_back(t.col <= t.row ? t : Triplet{t.col, t.row, t.value});
  }
  std::sort(lower.begin(), lower.end(), [](const Triplet &a, const Triplet &b)
            { return a.row != b.row ? a.row < b.row : a.col < b.col; });

  SparseSymMatrix a;
  a.n_ = n;
  a.row_ptr_.assign(n + 1, 0);
  std::size_t k = 0;
  for (std::size_t row = 0; row < n; row++)
  {
    while (k < lower.size() && static_cast<std::size_t>(lower[k].row) == row)
    {
      const int col = lower[k].col;
      double sum = 0.0;
      while (k < lower.size() && static_cast<std::size_t>(lower[k].row) == row &&
             lower[k].col == col)
      {
        sum += lower[k].value;
        k++;
      }
      if (sum != 0.0)
      {
        a.col_idx_.push_back(col);
        a.values_.push_back(sum);
      }
    }
    a.row_ptr_[row + 1] = a.values_.size();
  }
  return a;
}

SparseSymMatrix SparseSymMatrix::identity(std::size_t n)
{
  return diagonal(Vector(n, 1.0));
}

SparseSymMatrix SparseSymMatrix::diagonal(std::span<const double> d)
{
  std::vector<Triplet> t;
  t.reserve(d.size());
  for (std::size_t i = 0; i < d.size(); i++)
  {
    t.push_back({static_cast<int>(i), static_cast<int>(i), d[i]});
  }
  return from_triplets(d.size(), t);
}

void SparseSymMatrix::multiply(std::span<const double> x, std::span<double> y) const
{
  if (x.size() != n_ || y.size() != n_)
  {
    throw Error("SparseSymMatrix::multiply: dimension mismatch");
  }
  std::fill(y.begin(), y.end(), 0.0);
  for (std::size_t i = 0; i < n_; i++)
  {
    double yi = 0.0;
    const double xi = x[i];
    for (std::size_t k = row_ptr_[i]; k < row_ptr_[i + 1]; k++)
    {
      const auto j = static_cast<std::size_t>(col_idx_[k]);
      const double a = values_[k];
      yi += a * x[j];
      if (j != i)
      {
        y[j] += a * xi;
      }
    }
    y[i] += yi;
  }
}

Vector SparseSymMatrix::operator*(std::span<const double> x) const
{
  Vector y(n_);
  multiply(x, y);
  return y;
}

double SparseSymMatrix::at(std::size_t i, std::size_t j) const
{
  if (j > i)
  {
    std::swap(i, j);
  }
  const auto begin = col_idx_.begin() + static_cast<std::ptrdiff_t>(row_ptr_[i]);
  const auto end = col_idx_.begin() + static_cast<std::ptrdiff_t>(row_ptr_[i + 1]);
  const auto it = std::lower_bound(begin, end, static_cast<int>(j));
  if (it == end || *it != static_cast<int>(j))
  {
    return 0.0;
  }
  return values_[static_cast<std::size_t>(it - col_idx_.begin())];
}

Vector SparseSymMatrix::diagonal_entries() const
{
  Vector d(n_, 0.0);
  for (std::size_t i = 0; i < n_; i++)
  {
    const std::size_t last = row_ptr_[i + 1];
    if (last > row_ptr_[i] && static_cast<std::size_t>(col_idx_[last - 1]) == i)
    {
      d[i] = values_[last - 1];
    }
  }
  return d;
}

double SparseSymMatrix::norm_inf() const
{
  Vector rows(n_, 0.0);
  for (std::size_t i = 0; i < n_; i++)
  {
    for (std::size_t k = row_ptr_[i]; k < row_ptr_[i + 1]; k++)
    {
      const auto j = static_cast<std::size_t>(col_idx_[k]);
      rows[i] += std::abs(values_[k]);
      if (j != i)
      {
        rows[j] += std::abs(values_[k]);
      }
    }
  }
  return rows.empty() ? 0.0 : *std::max_element(rows.begin(), rows.end());
}

SparseSymMatrix SparseSymMatrix::restrict_to(std::span<const int> keep) const
{
  std::vector<int> map(n_, -1);
  for (std::size_t k = 0; k < keep.size(); k++)
  {
    map[keep[k]] = static_cast<int>(k);
  }
  std::vector<Triplet> t;
  for (std::size_t i = 0; i < n_; i++)
  {
    if (map[i] < 0)
    {
      continue;
    }
    for (std::size_t k = row_ptr_[i]; k < row_ptr_[i + 1]; k++)
    {
      const int j = map[col_idx_[k]];
      if (j >= 0)
      {
        t.push_back({map[i], j, values_[k]});
      }
    }
  }
  return from_triplets(keep.size(), t);
}

void write_coordinate(std::ostream &os, const SparseSymMatrix &a)
{
  const auto precision = os.precision(17);
  for (std::size_t i = 0; i < a.dim(); i++)
  {
    for (std::size_t k = a.row_ptr()[i]; k < a.row_ptr()[i + 1]; k++)
    {
      os << i << ' ' << a.col_idx()[k] << ' ' << a.values()[k] << '\n';
    }
  }
  os.precision(precision);
}

double dot(std::span<const double> x, std::span<const double> y)
{
  double s = 0.0;
  for (std::size_t i = 0; i < x.size(); i++)
  {
    s += x[i] * y[i];
  }
  return s;
}

double norm2(std::span<const double> x)
{
  return std::sqrt(dot(x, x));
}

void axpy(double alpha, std::span<const double> x, std::span<double> y)
{
  for (std::size_t i = 0; i < x.size(); i++)
  {
    y[i] += alpha * x[i];
  }
}

void scale(double alpha, std::span<double> x)
{
  for (double &v : x)
  {
    v *= alpha;
  }
}

double inner(const SparseSymMatrix &s, std::span<const double> u, std::span<const double> v)
{
  const Vector sv = s * v;
  return dot(u, sv);
}

}  // namespace paro
