// Copyright The paro-afem Authors
// SPDX-License-Identifier: Apache-2.0

#include "paro/assembly.hpp"

#include <cmath>

namespace paro
{

double Mat2::min_eigenvalue() const
{
  const double mean = 0.5 * (xx + yy);
  const double radius = std::hypot(0.5 * (xx - yy), xy);
  return mean - radius;
}

const QuadratureRule &triangle_rule(int order)
{
  static const QuadratureRule one{{{1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0}}, {1.0}};
  static const QuadratureRule two{{{2.0 / 3.0, 1.0 / 6.0, 1.0 / 6.0},
                                   {1.0 / 6.0, 2.0 / 3.0, 1.0 / 6.0},
                                   {1.0 / 6.0, 1.0 / 6.0, 2.0 / 3.0}},
                                  {1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0}};
  static const QuadratureRule three{{{1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0},
                                     {0.6, 0.2, 0.2},
                                     {0.2, 0.6, 0.2},
                                     {0.2, 0.2, 0.6}},
                                    {-27.0 / 48.0, 25.0 / 48.0, 25.0 / 48.0, 25.0 / 48.0}};
  switch (order)
  {
    case 1:
      return one;
    case 2:
      return two;
    case 3:
      return three;
    default:
      throw Error("quadrature order must be 1, 2 or 3 (got " + std::to_string(order) + ")");
  }
}

std::array<Point, 3> p1_gradients(const Mesh &mesh, int t)
{
  const auto p = mesh.corners(t);
  const double two_area = cross(p[1] - p[0], p[2] - p[0]);
  std::array<Point, 3> g;
  for (int k = 0; k < 3; k++)
  {
    const Point a = p[(k + 1) % 3];
    const Point b = p[(k + 2) % 3];
    g[k] = {(a.y - b.y) / two_area, (b.x - a.x) / two_area};
  }
  return g;
}

LocalMatrix local_stiffness(const Mesh &mesh, int t, const Coefficients &coeffs,
                            int quad_order)
{
  const QuadratureRule &rule = triangle_rule(quad_order);
  const auto p = mesh.corners(t);
  const double area = mesh.area(t);
  const int root = mesh.triangles()[t].root;
  const auto grad = p1_gradients(mesh, t);

  LocalMatrix k{};
  for (std::size_t q = 0; q < rule.points.size(); q++)
  {
    const auto &l = rule.points[q];
    const Point x = l[0] * p[0] + l[1] * p[1] + l[2] * p[2];
    const Mat2 a = coeffs.diffusion(x, root);
    if (!(a.min_eigenvalue() >= coeffs.ellipticity_floor))
    {
      throw Error("diffusion tensor is not uniformly positive definite on element " +
                  std::to_string(t) + " (smallest eigenvalue " +
                  std::to_string(a.min_eigenvalue()) + ")");
    }
    const double c = coeffs.reaction(x, root);
    if (!(c >= 0.0))
    {
      throw Error("reaction coefficient is negative on element " + std::to_string(t));
    }
    const double w = rule.weights[q] * area;
    for (int i = 0; i < 3; i++)
    {
      const Point ag = a.apply(grad[i]);
      for (int j = 0; j < 3; j++)
      {
        k[i][j] += w * (dot(ag, grad[j]) + c * l[i] * l[j]);
      }
    }
  }
  // The quadrature above is symmetric up to rounding; make it exact.
  for (int i = 0; i < 3; i++)
  {
    for (int j = 0; j < i; j++)
    {
      const double s = 0.5 * (k[i][j] + k[j][i]);
      k[i][j] = k[j][i] = s;
    }
  }
  return k;
}

LocalMatrix local_mass(double area)
{
  const double d = area / 6.0;
  const double o = area / 12.0;
  return {{{d, o, o}, {o, d, o}, {o, o, d}}};
}

Vector FemSystem::expand(std::span<const double> dofs) const
{
  if (dofs.size() != free_dofs.size())
  {
    throw Error("FemSystem::expand: expected " + std::to_string(free_dofs.size()) +
                " dof values, got " + std::to_string(dofs.size()));
  }
  Vector v(dof_of_vertex.size(), 0.0);
  for (std::size_t d = 0; d < free_dofs.size(); d++)
  {
    v[free_dofs[d]] = dofs[d];
  }
  return v;
}

Vector FemSystem::restrict(std::span<const double> vertex_values) const
{
  if (vertex_values.size() != dof_of_vertex.size())
  {
    throw Error("FemSystem::restrict: expected " + std::to_string(dof_of_vertex.size()) +
                " vertex values, got " + std::to_string(vertex_values.size()));
  }
  Vector d(free_dofs.size());
  for (std::size_t k = 0; k < free_dofs.size(); k++)
  {
    d[k] = vertex_values[free_dofs[k]];
  }
  return d;
}

namespace
{

void assemble_triplets(const Mesh &mesh, const Coefficients &coeffs, int quad_order,
                       std::span<const int> index, std::vector<Triplet> &kt,
                       std::vector<Triplet> &mt)
{
  kt.reserve(6 * mesh.num_triangles());
  mt.reserve(6 * mesh.num_triangles());
  for (std::size_t t = 0; t < mesh.num_triangles(); t++)
  {
    const auto &v = mesh.triangles()[t].v;
    const LocalMatrix k = local_stiffness(mesh, static_cast<int>(t), coeffs, quad_order);
    const LocalMatrix m = local_mass(mesh.area(static_cast<int>(t)));
    for (int i = 0; i < 3; i++)
    {
      const int gi = index[v[i]];
      if (gi < 0)
      {
        continue;
      }
      for (int j = 0; j < 3; j++)
      {
        const int gj = index[v[j]];
        // Only the lower triangle, so each symmetric pair enters once.
        if (gj < 0 || gj > gi)
        {
          continue;
        }
        kt.push_back({gi, gj, k[i][j]});
        mt.push_back({gi, gj, m[i][j]});
      }
    }
  }
}

}  // namespace

FemSystem assemble(const Mesh &mesh, const Coefficients &coeffs, int quad_order)
{
  triangle_rule(quad_order);
  FemSystem sys;
  sys.dof_of_vertex.assign(mesh.num_vertices(), -1);
  for (std::size_t i = 0; i < mesh.num_vertices(); i++)
  {
    if (!mesh.vertices()[i].on_boundary)
    {
      sys.dof_of_vertex[i] = static_cast<int>(sys.free_dofs.size());
      sys.free_dofs.push_back(static_cast<int>(i));
    }
  }
  std::vector<Triplet> kt, mt;
  assemble_triplets(mesh, coeffs, quad_order, sys.dof_of_vertex, kt, mt);
  sys.stiffness = SparseSymMatrix::from_triplets(sys.n_dofs(), kt);
  sys.mass = SparseSymMatrix::from_triplets(sys.n_dofs(), mt);
  return sys;
}

std::pair<SparseSymMatrix, SparseSymMatrix> assemble_full(const Mesh &mesh,
                                                          const Coefficients &coeffs,
                                                          int quad_order)
{
  std::vector<int> index(mesh.num_vertices());
  for (std::size_t i = 0; i < index.size(); i++)
  {
    index[i] = static_cast<int>(i);
  }
  std::vector<Triplet> kt, mt;
  assemble_triplets(mesh, coeffs, quad_order, index, kt, mt);
  return {SparseSymMatrix::from_triplets(index.size(), kt),
          SparseSymMatrix::from_triplets(index.size(), mt)};
}

double energy_norm(const FemSystem &sys, std::span<const double> u)
{
  if (u.size() != sys.n_dofs())
  {
    throw Error("energy_norm: vector length does not match n_dofs");
  }
  return std::sqrt(std::max(inner(sys.stiffness, u, u), 0.0));
}

double mass_norm(const FemSystem &sys, std::span<const double> u)
{
  if (u.size() != sys.n_dofs())
  {
    throw Error("mass_norm: vector length does not match n_dofs");
  }
  return std::sqrt(std::max(inner(sys.mass, u, u), 0.0));
}

double energy_by_elements(const Mesh &mesh, const Coefficients &coeffs,
                          std::span<const double> vertex_values, int quad_order)
{
  if (vertex_values.size() != mesh.num_vertices())
  {
    throw Error("energy_by_elements: expected one value per vertex");
  }
  double total = 0.0;
  for (std::size_t t = 0; t < mesh.num_triangles(); t++)
  {
    const auto &v = mesh.triangles()[t].v;
    const LocalMatrix k = local_stiffness(mesh, static_cast<int>(t), coeffs, quad_order);
    for (int i = 0; i < 3; i++)
    {
      for (int j = 0; j < 3; j++)
      {
        total += vertex_values[v[i]] * k[i][j] * vertex_values[v[j]];
      }
    }
  }
  return total;
}

}  // namespace paro
