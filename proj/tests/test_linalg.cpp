// Copyright The paro-afem Authors
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <cmath>
#include <random>
#include <sstream>
#include "paro/dense.hpp"
#include "paro/minres.hpp"
#include "paro/sparse.hpp"

using namespace paro;

namespace
{

// Random sparse SPD matrix: diagonally dominant with a few off-diagonal couplings.
SparseSymMatrix random_spd(std::size_t n, std::mt19937 &rng, double shift = 0.0)
{
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::uniform_int_distribution<std::size_t> col(0, n - 1);
  std::vector<Triplet> t;
  Vector diag(n, 1.0 + shift);
  for (std::size_t i = 0; i < n; i++)
  {
    for (int k = 0; k < 3; k++)
    {
      const std::size_t j = col(rng);
      if (j == i)
      {
        continue;
      }
      const double v = u(rng);
      t.push_back({static_cast<int>(i), static_cast<int>(j), v});
      diag[i] += std::abs(v);
      diag[j] += std::abs(v);
    }
  }
  for (std::size_t i = 0; i < n; i++)
  {
    t.push_back({static_cast<int>(i), static_cast<int>(i), diag[i]});
  }
  return SparseSymMatrix::from_triplets(n, t);
}

DenseMatrix to_dense(const SparseSymMatrix &a)
{
  DenseMatrix d(a.dim(), a.dim());
  for (std::size_t i = 0; i < a.dim(); i++)
  {
    for (std::size_t j = 0; j < a.dim(); j++)
    {
      d(i, j) = a.at(i, j);
    }
  }
  return d;
}

Vector random_vector(std::size_t n, std::mt19937 &rng)
{
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Vector v(n);
  for (auto &x : v)
  {
    x = u(rng);
  }
  return v;
}

DenseMatrix random_symmetric(std::size_t n, std::mt19937 &rng)
{
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  DenseMatrix a(n, n);
  for (std::size_t i = 0; i < n; i++)
  {
    for (std::size_t j = 0; j <= i; j++)
    {
      a(i, j) = a(j, i) = u(rng);
    }
  }
  return a;
}

}  // namespace

TEST_CASE("sparse triplets fold and sum")
{
  const std::vector<Triplet> t{{0, 0, 2.0}, {0, 1, 1.0}, {1, 0, 0.5}, {1, 1, 3.0}, {2, 2, 0.0}};
  const SparseSymMatrix a = SparseSymMatrix::from_triplets(3, t);
  CHECK(a.at(0, 1) == 1.5);
  CHECK(a.at(1, 0) == 1.5);
  CHECK(a.at(2, 2) == 0.0);
  CHECK(a.stored_nonzeros() == 3);
  const Vector y = a * Vector{1.0, 1.0, 1.0};
  CHECK(y[0] == 3.5);
  CHECK(y[1] == 4.5);
  CHECK(y[2] == 0.0);
  CHECK(a.norm_inf() == 4.5);

  const SparseSymMatrix sub = a.restrict_to(std::vector<int>{1, 2});
  CHECK(sub.dim() == 2);
  CHECK(sub.at(0, 0) == 3.0);

  std::ostringstream os;
  write_coordinate(os, a);
  CHECK(os.str().find("1 0 1.5") != std::string::npos);
}

TEST_CASE("MINRES diagonal examples")
{
  const SparseSymMatrix d = SparseSymMatrix::diagonal(Vector{2.0, 1.0});
  MatrixOperator op(d);
  const MinresResult r = minres_solve(op, Vector{2.0, 1.0});
  CHECK(r.status == MinresStatus::Converged);
  CHECK(r.x[0] == doctest::Approx(1.0));
  CHECK(r.x[1] == doctest::Approx(1.0));

  const SparseSymMatrix ind = SparseSymMatrix::diagonal(Vector{-1.0, 3.0});
  MatrixOperator op2(ind);
  const MinresResult r2 = minres_solve(op2, Vector{1.0, 3.0});
  CHECK(r2.status == MinresStatus::Converged);
  CHECK(r2.x[0] == doctest::Approx(-1.0));
  CHECK(r2.x[1] == doctest::Approx(1.0));

  const MinresResult zero = minres_solve(op, Vector{0.0, 0.0});
  CHECK(zero.status == MinresStatus::ZeroRhs);
  CHECK(zero.x[0] == 0.0);

  CHECK_THROWS_AS(minres_solve(op, Vector{1.0}), Error);
  CHECK_THROWS_AS(minres_solve(op, Vector{1.0, std::nan("")}), Error);
}

TEST_CASE("MINRES agrees with dense LU on SPD systems")
{
  std::mt19937 rng(17);
  for (int trial = 0; trial < 5; trial++)
  {
    const SparseSymMatrix a = random_spd(50, rng);
    const Vector b = random_vector(50, rng);
    MatrixOperator op(a);
    for (bool jacobi : {false, true})
    {
      MinresOptions opt;
      opt.rel_tol = 1e-12;
      opt.jacobi = jacobi;
      const MinresResult r = minres_solve(op, b, opt);
      CHECK(r.status == MinresStatus::Converged);
      const Vector x = lu_solve(to_dense(a), b);
      for (std::size_t i = 0; i < x.size(); i++)
      {
        CHECK(r.x[i] == doctest::Approx(x[i]).epsilon(1e-9));
      }
      CHECK(r.rel_residual <= 1e-10);
      for (std::size_t k = 1; k < r.residual_history.size(); k++)
      {
        CHECK(r.residual_history[k] <= r.residual_history[k - 1] * (1 + 1e-12));
      }
    }
  }
}

TEST_CASE("MINRES on an indefinite shifted pencil")
{
  std::mt19937 rng(23);
  const SparseSymMatrix k = random_spd(60, rng);
  const SparseSymMatrix m = SparseSymMatrix::identity(60);
  const ShiftedOperator op(k, m, 2.5);
  const Vector b = random_vector(60, rng);
  MinresOptions opt;
  opt.rel_tol = 1e-11;
  const MinresResult r = minres_solve(op, b, opt);
  CHECK(r.status == MinresStatus::Converged);
  Vector ax(60);
  op.apply(r.x, ax);
  double err = 0.0;
  for (std::size_t i = 0; i < 60; i++)
  {
    err = std::max(err, std::abs(ax[i] - b[i]));
  }
  CHECK(err < 1e-8);
  const Vector d = op.diagonal();
  CHECK(d[0] == doctest::Approx(k.at(0, 0) - 2.5));
}

TEST_CASE("MINRES iteration cap")
{
  std::mt19937 rng(29);
  const SparseSymMatrix a = random_spd(40, rng);
  MatrixOperator op(a);
  MinresOptions opt;
  opt.max_iter = 2;
  opt.rel_tol = 1e-14;
  const MinresResult r = minres_solve(op, random_vector(40, rng), opt);
  CHECK(r.status == MinresStatus::MaxIterations);
  CHECK(r.iterations == 2);
}

TEST_CASE("dense generalized eigen examples")
{
  DenseMatrix a = DenseMatrix::identity(2);
  a(1, 1) = 2.0;
  const SymEigen e = dense_sym_gen_eig({a, DenseMatrix::identity(2)});
  CHECK(e.values[0] == doctest::Approx(1.0));
  CHECK(e.values[1] == doctest::Approx(2.0));
  CHECK(std::abs(e.vectors(0, 0)) == doctest::Approx(1.0));

  DenseMatrix m = DenseMatrix::identity(2);
  m(0, 0) = 4.0;
  const SymEigen f = dense_sym_gen_eig({DenseMatrix::identity(2), m});
  CHECK(f.values[0] == doctest::Approx(0.25));
  CHECK(f.values[1] == doctest::Approx(1.0));
  const DenseMatrix vtmv = f.vectors.transpose() * m * f.vectors;
  CHECK((vtmv - DenseMatrix::identity(2)).norm() < 1e-12);

  DenseMatrix not_spd = DenseMatrix::identity(2);
  not_spd(1, 1) = -1.0;
  CHECK_THROWS_AS(cholesky(not_spd), Error);
}

TEST_CASE("Jacobi eigen and pencil reduction on random matrices")
{
  std::mt19937 rng(31);
  for (std::size_t n : {1u, 3u, 8u, 20u})
  {
    const DenseMatrix a = random_symmetric(n, rng);
    const SymEigen e = jacobi_eigen(a);
    for (std::size_t k = 1; k < n; k++)
    {
      CHECK(e.values[k - 1] <= e.values[k]);
    }
    const DenseMatrix vtv = e.vectors.transpose() * e.vectors;
    CHECK((vtv - DenseMatrix::identity(n)).norm() < 1e-12);
    DenseMatrix lam(n, n);
    for (std::size_t k = 0; k < n; k++)
    {
      lam(k, k) = e.values[k];
    }
    CHECK((a * e.vectors - e.vectors * lam).norm() < 1e-11);

    DenseMatrix b = random_symmetric(n, rng);
    b = b * b.transpose();
    for (std::size_t i = 0; i < n; i++)
    {
      b(i, i) += 1.0;
    }
    const SymEigen g = dense_sym_gen_eig({a, b});
    CHECK((g.vectors.transpose() * b * g.vectors - DenseMatrix::identity(n)).norm() < 1e-10);
    CHECK((a * g.vectors - b * g.vectors * [&]
           {
             DenseMatrix d(n, n);
             for (std::size_t k = 0; k < n; k++)
             {
               d(k, k) = g.values[k];
             }
             return d;
           }())
            .norm() < 1e-10);
    const DenseMatrix l = cholesky(b);
    CHECK((l * l.transpose() - b).norm() < 1e-12);
  }
}

TEST_CASE("lu_solve with pivoting")
{
  DenseMatrix a(2, 2);
  a(0, 0) = 0.0;
  a(0, 1) = 1.0;
  a(1, 0) = 2.0;
  a(1, 1) = 0.0;
  const Vector x = lu_solve(a, Vector{3.0, 4.0});
  CHECK(x[0] == doctest::Approx(2.0));
  CHECK(x[1] == doctest::Approx(3.0));
  CHECK_THROWS_AS(lu_solve(DenseMatrix(2, 2), Vector{1.0, 1.0}), Error);
}

TEST_CASE("gram matrices")
{
  const SparseSymMatrix id = SparseSymMatrix::identity(3);
  const std::vector<Vector> e{{1, 0, 0}, {0, 1, 0}};
  CHECK((gram(e, id) - DenseMatrix::identity(2)).norm() == 0.0);

  const SparseSymMatrix k = SparseSymMatrix::diagonal(Vector{2.0, 3.0, 4.0});
  const std::vector<Vector> u{{1.0, 1.0, 1.0}};
  CHECK(gram(u, k)(0, 0) == doctest::Approx(9.0));

  const std::vector<Vector> dup{{1.0, 2.0, 3.0}, {1.0, 2.0, 3.0}};
  const DenseMatrix g = gram(dup, k);
  CHECK(std::abs(g(0, 0) * g(1, 1) - g(0, 1) * g(1, 0)) < 1e-12);
}

TEST_CASE("b-orthonormalization")
{
  std::mt19937 rng(37);
  const SparseSymMatrix m = random_spd(30, rng);

  std::vector<Vector> v;
  for (int k = 0; k < 5; k++)
  {
    v.push_back(random_vector(30, rng));
  }
  const auto q = b_orthonormalize(v, m);
  CHECK((gram(q, m) - DenseMatrix::identity(5)).norm() < 1e-12);
  const auto again = b_orthonormalize(q, m);
  for (std::size_t k = 0; k < q.size(); k++)
  {
    for (std::size_t i = 0; i < 30; i++)
    {
      CHECK(again[k][i] == doctest::Approx(q[k][i]).epsilon(1e-12));
    }
  }

  const auto single = b_orthonormalize(std::vector<Vector>{v[0]}, m);
  CHECK(inner(m, single[0], single[0]) == doctest::Approx(1.0));

  CHECK_THROWS_WITH_AS(b_orthonormalize(std::vector<Vector>{v[0], v[0]}, m),
                       doctest::Contains("1"), Error);

  // Badly scaled but independent vectors are accepted.
  std::vector<Vector> scaled{v[0], v[1]};
  scale(1e-9, scaled[1]);
  CHECK(b_orthonormalize(scaled, m).size() == 2);
}

TEST_CASE("combine")
{
  const std::vector<Vector> v{{1.0, 0.0}, {0.0, 1.0}};
  DenseMatrix c(2, 1);
  c(0, 0) = 2.0;
  c(1, 0) = -1.0;
  const auto out = combine(v, c);
  REQUIRE(out.size() == 1);
  CHECK(out[0][0] == 2.0);
  CHECK(out[0][1] == -1.0);
}
