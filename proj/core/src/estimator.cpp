// Copyright The paro-afem Authors
// SPDX-License-Identifier: Apache-2.0

#include "paro/estimator.hpp"

#include <cmath>
#include <ostream>
#include "paro/format.hpp"
#include "paro/parallel.hpp"

namespace paro
{

namespace
{

Point gradient(const Mesh &mesh, int t, std::span<const double> w)
{
  const auto g = p1_gradients(mesh, t);
  const auto &v = mesh.triangles()[t].v;
  return w[v[0]] * g[0] + w[v[1]] * g[1] + w[v[2]] * g[2];
}

// div(A g) for a constant vector g, by central differences of A.
double divergence(const TensorField &a, Point x, int root, Point g, double h)
{
  const double d = 1e-6 * h;
  const Point ex{d, 0.0}, ey{0.0, d};
  const Point fxp = a(x + ex, root).apply(g), fxm = a(x - ex, root).apply(g);
  const Point fyp = a(x + ey, root).apply(g), fym = a(x - ey, root).apply(g);
  return (fxp.x - fxm.x) / (2.0 * d) + (fyp.y - fym.y) / (2.0 * d);
}

}  // namespace

ResidualBlock make_residual_block(const FemSystem &sys, std::span<const Vector> dof_vectors,
                                  std::span<const double> lambdas)
{
  if (dof_vectors.size() != lambdas.size())
  {
    throw Error("make_residual_block: " + std::to_string(dof_vectors.size()) + " vectors but " +
                std::to_string(lambdas.size()) + " eigenvalues");
  }
  ResidualBlock block;
  block.lambdas.assign(lambdas.begin(), lambdas.end());
  block.mass_gram = gram(dof_vectors, sys.mass);
  for (const auto &u : dof_vectors)
  {
    block.vertex_values.push_back(sys.expand(u));
  }
  return block;
}

ResidualBlock make_residual_block(const FemSystem &sys, const OrbitalBlock &block)
{
  return make_residual_block(sys, block.vectors, block.ritz_values);
}

Vector element_residual(const Mesh &mesh, const Coefficients &coeffs,
                        const ResidualBlock &block, std::size_t k, int t)
{
  const QuadratureRule &rule = triangle_rule(2);
  const auto p = mesh.corners(t);
  const auto &v = mesh.triangles()[t].v;
  const int root = mesh.triangles()[t].root;
  const auto &w = block.vertex_values[k];
  const bool constant_a = coeffs.diffusion.piecewise_constant();
  const Point g = constant_a ? Point{} : gradient(mesh, t, w);
  const double h = mesh.diameter(t);

  Vector r(rule.points.size(), 0.0);
  for (std::size_t q = 0; q < rule.points.size(); q++)
  {
    const auto &l = rule.points[q];
    const Point x = l[0] * p[0] + l[1] * p[1] + l[2] * p[2];
    auto value = [&](const Vector &u) { return l[0] * u[v[0]] + l[1] * u[v[1]] + l[2] * u[v[2]]; };
    double s = 0.0;
    for (std::size_t j = 0; j < block.vertex_values.size(); j++)
    {
      const double c = block.mass_gram(k, j) * block.lambdas[j];
      if (c != 0.0)
      {
        s += c * value(block.vertex_values[j]);
      }
    }
    if (!constant_a)
    {
      s += divergence(coeffs.diffusion, x, root, g, h);
    }
    s -= coeffs.reaction(x, root) * value(w);
    r[q] = s;
  }
  return r;
}

std::array<double, 2> jump_residual(const Mesh &mesh, const Coefficients &coeffs,
                                    std::span<const double> vertex_values, int e)
{
  const Edge &edge = mesh.edges()[e];
  if (!edge.interior())
  {
    throw Error("jump_residual: edge " + std::to_string(e) + " lies on the boundary");
  }
  const int tp = edge.tri[0], tm = edge.tri[1];
  const Point gp = gradient(mesh, tp, vertex_values);
  const Point gm = gradient(mesh, tm, vertex_values);
  const int rp = mesh.triangles()[tp].root, rm = mesh.triangles()[tm].root;
  const Point a = mesh.point(edge.v[0]), b = mesh.point(edge.v[1]);
  const double off = 0.5 / std::sqrt(3.0);
  std::array<double, 2> j{};
  for (int q = 0; q < 2; q++)
  {
    const double s = 0.5 + (q == 0 ? -off : off);
    const Point x = (1.0 - s) * a + s * b;
    const Point flux = coeffs.diffusion(x, rp).apply(gp) - coeffs.diffusion(x, rm).apply(gm);
    j[q] = dot(flux, edge.normal);
  }
  return j;
}

double local_indicator(const Mesh &mesh, const Coefficients &coeffs,
                       const ResidualBlock &block, std::size_t k, int t)
{
  const QuadratureRule &rule = triangle_rule(2);
  const Vector r = element_residual(mesh, coeffs, block, k, t);
  const double area = mesh.area(t);
  double r_sq = 0.0;
  for (std::size_t q = 0; q < r.size(); q++)
  {
    r_sq += rule.weights[q] * area * r[q] * r[q];
  }
  const double h = mesh.diameter(t);
  double eta_sq = h * h * r_sq;
  for (int e : mesh.triangle_edges(t))
  {
    if (!mesh.edges()[e].interior())
    {
      continue;
    }
    const auto j = jump_residual(mesh, coeffs, block.vertex_values[k], e);
    const double he = mesh.edge_length(e);
    const double j_sq = 0.5 * he * (j[0] * j[0] + j[1] * j[1]);
    eta_sq += he * j_sq;
  }
  return eta_sq;
}

Indicators estimate(const Mesh &mesh, const Coefficients &coeffs, const ResidualBlock &block,
                    std::size_t threads)
{
  Indicators ind;
  const std::size_t nt = mesh.num_triangles();
  ind.per_element.assign(nt, 0.0);
  constexpr std::size_t chunk = 256;
  const std::size_t chunks = (nt + chunk - 1) / chunk;
  parallel_for(chunks, threads,
               [&](std::size_t c)
               {
                 const std::size_t end = std::min(nt, (c + 1) * chunk);
                 for (std::size_t t = c * chunk; t < end; t++)
                 {
                   double s = 0.0;
                   for (std::size_t k = 0; k < block.vertex_values.size(); k++)
                   {
                     s += local_indicator(mesh, coeffs, block, k, static_cast<int>(t));
                   }
                   ind.per_element[t] = s;
                 }
               });
  for (double v : ind.per_element)
  {
    ind.global_sq += v;
  }
  return ind;
}

Indicators estimate(const Mesh &mesh, const Coefficients &coeffs, const FemSystem &sys,
                    const OrbitalBlock &block, std::size_t threads)
{
  return estimate(mesh, coeffs, make_residual_block(sys, block), threads);
}

void write_indicators(std::ostream &os, const Indicators &indicators)
{
  os << "element_index,eta_sq\n";
  for (std::size_t t = 0; t < indicators.per_element.size(); t++)
  {
    os << t << ',' << format_double(indicators.per_element[t]) << '\n';
  }
}

}  // namespace paro
