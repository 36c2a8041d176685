// Copyright The paro-afem Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef PARO_ESTIMATOR_HPP
#define PARO_ESTIMATOR_HPP

#include <array>
#include <cstddef>
#include <iosfwd>
#include <span>
#include <vector>
#include "paro/assembly.hpp"
#include "paro/dense.hpp"
#include "paro/orbital.hpp"

namespace paro
{

struct Indicators
{
  Vector per_element;  // eta^2(W, T), aligned with the triangle list.
  double global_sq = 0.0;
};

// Vertex-level view of an orbital block used by the residual evaluations: nodal values of
// every orbital, their eigenvalue approximations and the mass Gram matrix b(u_k, u_l).
struct ResidualBlock
{
  std::vector<Vector> vertex_values;
  Vector lambdas;
  DenseMatrix mass_gram;
};

ResidualBlock make_residual_block(const FemSystem &sys, std::span<const Vector> dof_vectors,
                                  std::span<const double> lambdas);
ResidualBlock make_residual_block(const FemSystem &sys, const OrbitalBlock &block);

// Element residual of orbital k,
//   sum_l b(u_k, u_l) lambda_l u_l + div(A grad u_k) - c u_k,
// sampled at the points of the order-2 rule on T.
Vector element_residual(const Mesh &mesh, const Coefficients &coeffs,
                        const ResidualBlock &block, std::size_t k, int t);

// Conormal flux jump (A grad w+ - A grad w-) . nu_e at the two Gauss points of interior
// edge e. Throws for a boundary edge.
std::array<double, 2> jump_residual(const Mesh &mesh, const Coefficients &coeffs,
                                    std::span<const double> vertex_values, int e);

// h_T^2 ||R_T||^2 + sum over interior edges of T of h_e ||J_e||^2, for orbital k.
double local_indicator(const Mesh &mesh, const Coefficients &coeffs,
                       const ResidualBlock &block, std::size_t k, int t);

// Sum of the local indicators over the block, for every element.
Indicators estimate(const Mesh &mesh, const Coefficients &coeffs, const ResidualBlock &block,
                    std::size_t threads = 1);
Indicators estimate(const Mesh &mesh, const Coefficients &coeffs, const FemSystem &sys,
                    const OrbitalBlock &block, std::size_t threads = 1);

// "element_index,eta_sq" header plus one row per element.
void write_indicators(std::ostream &os, const Indicators &indicators);

}  // namespace paro

#endif  // PARO_ESTIMATOR_HPP
