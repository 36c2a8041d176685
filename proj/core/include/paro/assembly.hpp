// Copyright The paro-afem Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef PARO_ASSEMBLY_HPP
#define PARO_ASSEMBLY_HPP

#include <array>
#include <functional>
#include <span>
#include <variant>
#include <vector>
#include "paro/mesh.hpp"
#include "paro/sparse.hpp"

namespace paro
{

// Symmetric 2x2 matrix [[xx, xy], [xy, yy]].
struct Mat2
{
  double xx = 1.0;
  double xy = 0.0;
  double yy = 1.0;

  static Mat2 identity() { return {}; }
  static Mat2 scalar(double s) { return {s, 0.0, s}; }

  Point apply(Point p) const { return {xx * p.x + xy * p.y, xy * p.x + yy * p.y}; }
  double min_eigenvalue() const;

  bool operator==(const Mat2 &) const = default;
};

// Coefficient field: a constant, a table indexed by the element's root in the initial mesh,
// or a function of position.
template <typename T>
class Field
{
public:
  using Function = std::function<T(Point)>;

  Field() = default;
  Field(T value) : data_(value) {}  // NOLINT(google-explicit-constructor)
  static Field per_root(std::vector<T> table) { return Field(std::move(table)); }
  static Field function(Function f) { return Field(std::move(f)); }

  T operator()(Point p, int root) const
  {
    if (const auto *c = std::get_if<T>(&data_))
    {
      return *c;
    }
    if (const auto *table = std::get_if<std::vector<T>>(&data_))
    {
      if (root < 0 || static_cast<std::size_t>(root) >= table->size())
      {
        throw Error("coefficient table has no entry for root element " +
                    std::to_string(root));
      }
      return (*table)[root];
    }
    return std::get<Function>(data_)(p);
  }

  // Constant on every element of any mesh refined from the initial one.
  bool piecewise_constant() const { return !std::holds_alternative<Function>(data_); }
  bool is_constant() const { return std::holds_alternative<T>(data_); }

private:
  explicit Field(std::vector<T> table) : data_(std::move(table)) {}
  explicit Field(Function f) : data_(std::move(f)) {}

  std::variant<T, std::vector<T>, Function> data_ = T{};
};

using TensorField = Field<Mat2>;
using ScalarField = Field<double>;

// -div(A grad u) + c u.
struct Coefficients
{
  TensorField diffusion = Mat2::identity();
  ScalarField reaction = 0.0;
  // Lower bound required for the smallest eigenvalue of A at every quadrature point.
  double ellipticity_floor = 1e-12;

  static Coefficients laplace() { return {}; }
};

// Quadrature on the reference triangle: barycentric points, weights summing to one.
struct QuadratureRule
{
  std::vector<std::array<double, 3>> points;
  std::vector<double> weights;
};

// order 1: centroid; order 2: 3-point; order 3: 4-point.
const QuadratureRule &triangle_rule(int order);

// Gradients of the three P1 basis functions of triangle t.
std::array<Point, 3> p1_gradients(const Mesh &mesh, int t);

using LocalMatrix = std::array<std::array<double, 3>, 3>;

// Element stiffness (A grad phi_j, grad phi_i) + (c phi_j, phi_i) by quadrature. Throws
// naming the element when A is not uniformly elliptic or c is negative.
LocalMatrix local_stiffness(const Mesh &mesh, int t, const Coefficients &coeffs,
                            int quad_order = 2);
// Exact P1 mass matrix (|T|/12) [[2,1,1],[1,2,1],[1,1,2]].
LocalMatrix local_mass(double area);

//
// Discrete pencil on the free (interior) vertices.
//
struct FemSystem
{
  SparseSymMatrix stiffness;
  SparseSymMatrix mass;
  std::vector<int> free_dofs;      // dof -> vertex
  std::vector<int> dof_of_vertex;  // vertex -> dof, -1 on the Dirichlet boundary

  std::size_t n_dofs() const { return free_dofs.size(); }
  // Vertex values with zeros on the boundary.
  Vector expand(std::span<const double> dofs) const;
  // Values at the free vertices.
  Vector restrict(std::span<const double> vertex_values) const;
};

FemSystem assemble(const Mesh &mesh, const Coefficients &coeffs, int quad_order = 2);

// Stiffness and mass over all vertices, before Dirichlet elimination.
std::pair<SparseSymMatrix, SparseSymMatrix> assemble_full(const Mesh &mesh,
                                                          const Coefficients &coeffs,
                                                          int quad_order = 2);

// sqrt(u^T K u) and sqrt(u^T M u).
double energy_norm(const FemSystem &sys, std::span<const double> u);
double mass_norm(const FemSystem &sys, std::span<const double> u);

// sum_T u_T^T K_T u_T from the element matrices (vertex values).
double energy_by_elements(const Mesh &mesh, const Coefficients &coeffs,
                          std::span<const double> vertex_values, int quad_order = 2);

}  // namespace paro

#endif  // PARO_ASSEMBLY_HPP
