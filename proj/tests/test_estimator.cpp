// Copyright The paro-afem Authors
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <cmath>
#include <sstream>
#include "paro/estimator.hpp"
#include "paro/verify.hpp"

using namespace paro;

namespace
{

int diagonal_edge(const Mesh &mesh)
{
  for (std::size_t e = 0; e < mesh.edges().size(); e++)
  {
    if (mesh.edges()[e].interior())
    {
      return static_cast<int>(e);
    }
  }
  return -1;
}

ResidualBlock single_orbital(const Vector &vertex_values, double lambda)
{
  ResidualBlock b;
  b.vertex_values = {vertex_values};
  b.lambdas = {lambda};
  b.mass_gram = DenseMatrix::identity(1);
  return b;
}

Mesh square(int rounds)
{
  return refine_uniform(build_initial_mesh(DomainSpec::unit_square()), rounds);
}

}  // namespace

TEST_CASE("flux jump across the square diagonal")
{
  const Mesh mesh = build_initial_mesh(DomainSpec::unit_square());
  const int e = diagonal_edge(mesh);
  REQUIRE(e >= 0);
  // Half the hat of (1, 0): gradient (1/2, -1/2) on one side, zero on the other.
  const Vector w{0.0, 0.5, 0.0, 0.0};
  const auto j = jump_residual(mesh, Coefficients::laplace(), w, e);
  CHECK(std::abs(j[0]) == doctest::Approx(1.0 / std::sqrt(2.0)));
  CHECK(std::abs(j[1]) == doctest::Approx(1.0 / std::sqrt(2.0)));

  // No element residual: the edge term h_e ||J||^2 = sqrt(2) * (sqrt(2) / 2) = 1 per side.
  const ResidualBlock b = single_orbital(w, 0.0);
  CHECK(local_indicator(mesh, Coefficients::laplace(), b, 0, 0) == doctest::Approx(1.0));
  CHECK(local_indicator(mesh, Coefficients::laplace(), b, 0, 1) == doctest::Approx(1.0));
  const Indicators ind = estimate(mesh, Coefficients::laplace(), b);
  CHECK(ind.global_sq == doctest::Approx(2.0));

  int boundary = -1;
  for (std::size_t k = 0; k < mesh.edges().size(); k++)
  {
    if (!mesh.edges()[k].interior())
    {
      boundary = static_cast<int>(k);
    }
  }
  CHECK_THROWS_AS(jump_residual(mesh, Coefficients::laplace(), w, boundary), Error);
}

TEST_CASE("globally linear functions have no jumps")
{
  const Mesh mesh = square(5);
  Coefficients coeffs;
  coeffs.diffusion = Mat2{2.0, 0.5, 1.0};
  Vector w(mesh.num_vertices());
  for (std::size_t i = 0; i < w.size(); i++)
  {
    const Point p = mesh.point(static_cast<int>(i));
    w[i] = 3.0 * p.x - p.y;
  }
  for (std::size_t e = 0; e < mesh.edges().size(); e++)
  {
    if (mesh.edges()[e].interior())
    {
      const auto j = jump_residual(mesh, coeffs, w, static_cast<int>(e));
      CHECK(std::abs(j[0]) < 1e-12);
      CHECK(std::abs(j[1]) < 1e-12);
    }
  }
}

TEST_CASE("zero orbital has zero indicators")
{
  const Mesh mesh = square(4);
  const ResidualBlock b = single_orbital(Vector(mesh.num_vertices(), 0.0), 19.7);
  const Indicators ind = estimate(mesh, Coefficients::laplace(), b);
  CHECK(ind.global_sq == 0.0);
  for (double v : ind.per_element)
  {
    CHECK(v == 0.0);
  }
}

TEST_CASE("element residual of a b-orthonormal block")
{
  const Mesh mesh = square(6);
  const FemSystem sys = assemble(mesh, Coefficients::laplace());
  const ReferencePairs ref = reference_eig(sys, 3);
  const ResidualBlock b = make_residual_block(sys, ref.vectors, ref.values);
  const QuadratureRule &rule = triangle_rule(2);
  for (int t : {0, 17, 100})
  {
    const Vector r = element_residual(mesh, Coefficients::laplace(), b, 1, t);
    const auto &v = mesh.triangles()[t].v;
    for (std::size_t q = 0; q < r.size(); q++)
    {
      const auto &l = rule.points[q];
      const auto &u = b.vertex_values[1];
      const double value = l[0] * u[v[0]] + l[1] * u[v[1]] + l[2] * u[v[2]];
      CHECK(r[q] == doctest::Approx(ref.values[1] * value).epsilon(1e-9));
    }
  }
  CHECK_THROWS_AS(make_residual_block(sys, ref.vectors, Vector{1.0}), Error);
}

TEST_CASE("indicators are additive and thread independent")
{
  const Mesh mesh = square(8);
  const FemSystem sys = assemble(mesh, Coefficients::laplace());
  const ReferencePairs ref = reference_eig(sys, 2);
  const ResidualBlock b = make_residual_block(sys, ref.vectors, ref.values);
  const Indicators one = estimate(mesh, Coefficients::laplace(), b, 1);
  const Indicators many = estimate(mesh, Coefficients::laplace(), b, 4);
  CHECK(one.per_element == many.per_element);
  CHECK(one.global_sq == many.global_sq);
  double sum = 0.0;
  for (std::size_t t = 0; t < mesh.num_triangles(); t++)
  {
    const double a = local_indicator(mesh, Coefficients::laplace(), b, 0, static_cast<int>(t));
    const double c = local_indicator(mesh, Coefficients::laplace(), b, 1, static_cast<int>(t));
    CHECK(one.per_element[t] == doctest::Approx(a + c));
    CHECK(one.per_element[t] >= 0.0);
    sum += a + c;
  }
  CHECK(one.global_sq == doctest::Approx(sum));

  std::ostringstream os;
  write_indicators(os, one);
  CHECK(os.str().rfind("element_index,eta_sq\n0,", 0) == 0);
}

TEST_CASE("estimator of the discrete ground state decays like h^2")
{
  double previous = 0.0;
  for (int rounds : {6, 8, 10})
  {
    const Mesh mesh = square(rounds);
    const FemSystem sys = assemble(mesh, Coefficients::laplace());
    const ReferencePairs ref = reference_eig(sys, 1);
    const double eta_sq =
      estimate(mesh, Coefficients::laplace(), make_residual_block(sys, ref.vectors, ref.values))
        .global_sq;
    if (previous > 0.0)
    {
      const double ratio = previous / eta_sq;
      CHECK(ratio > 3.0);
      CHECK(ratio < 5.0);
    }
    previous = eta_sq;
  }
}

TEST_CASE("callable and constant diffusion agree")
{
  const Mesh mesh = square(6);
  Coefficients constant;
  constant.diffusion = Mat2{1.5, 0.25, 1.0};
  constant.reaction = 2.0;
  Coefficients callable = constant;
  callable.diffusion = TensorField::function([](Point) { return Mat2{1.5, 0.25, 1.0}; });
  callable.reaction = ScalarField::function([](Point) { return 2.0; });
  const FemSystem sys = assemble(mesh, constant);
  const ReferencePairs ref = reference_eig(sys, 2);
  const ResidualBlock b = make_residual_block(sys, ref.vectors, ref.values);
  const Indicators a = estimate(mesh, constant, b);
  const Indicators c = estimate(mesh, callable, b);
  CHECK(a.global_sq == doctest::Approx(c.global_sq).epsilon(1e-6));
}
