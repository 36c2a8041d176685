// Copyright The paro-afem Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef PARO_MESH_HPP
#define PARO_MESH_HPP

#include <array>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>
#include "paro/types.hpp"

namespace paro
{

struct Vertex
{
  double x = 0.0;
  double y = 0.0;
  bool on_boundary = false;

  Point point() const { return {x, y}; }
};

// Counter-clockwise triangle. v[0] is the peak (newest vertex); the refinement edge is
// (v[1], v[2]). root is the index of the ancestor in the initial mesh.
struct Triangle
{
  std::array<int, 3> v{};
  int generation = 0;
  int root = 0;

  std::array<int, 2> refinement_edge() const { return {v[1], v[2]}; }
};

// tri[0] is T+ and tri[1] is T- (-1 on the boundary). normal is the unit outward normal
// of T-, i.e. it points from T- into T+. For boundary edges it is the outward normal of
// tri[0].
struct Edge
{
  std::array<int, 2> v{};
  std::array<int, 2> tri{-1, -1};
  Point normal;

  bool interior() const { return tri[1] >= 0; }
};

// Description of one of the built-in domains or an explicit triangulation.
struct DomainSpec
{
  enum class Kind
  {
    UnitSquare,
    LShape,
    Explicit
  };

  Kind kind = Kind::UnitSquare;
  std::vector<Point> points;                  // Explicit only.
  std::vector<std::array<int, 3>> triangles;  // Explicit only.

  static DomainSpec unit_square() { return {}; }
  static DomainSpec l_shape() { return {Kind::LShape, {}, {}}; }
  static DomainSpec explicit_mesh(std::vector<Point> points,
                                  std::vector<std::array<int, 3>> triangles)
  {
    return {Kind::Explicit, std::move(points), std::move(triangles)};
  }
  static DomainSpec from_name(const std::string &name);
  std::string name() const;
};

//
// Conforming triangulation with newest-vertex bisection bookkeeping. A Mesh is immutable
// once constructed; refinement produces a new one.
//
class Mesh
{
public:
  Mesh() = default;

  // Builds the topology of an already-labelled triangle list (peaks in v[0]). Throws if a
  // triangle is degenerate or clockwise, duplicated, or if an edge is shared by more than
  // two triangles.
  Mesh(std::vector<Vertex> vertices, std::vector<Triangle> triangles);

  const std::vector<Vertex> &vertices() const { return vertices_; }
  const std::vector<Triangle> &triangles() const { return triangles_; }
  const std::vector<Edge> &edges() const { return edges_; }

  std::size_t num_vertices() const { return vertices_.size(); }
  std::size_t num_triangles() const { return triangles_.size(); }

  // Edge indices of triangle t; entry k is the edge opposite local vertex k.
  const std::array<int, 3> &triangle_edges(int t) const { return triangle_edges_[t]; }

  Point point(int vertex) const { return vertices_[vertex].point(); }
  std::array<Point, 3> corners(int t) const;
  double area(int t) const;
  double diameter(int t) const;
  double edge_length(int e) const;
  double h_max() const { return h_max_; }

  // h_T / rho_T with rho_T the diameter of the inscribed circle.
  double shape_ratio(int t) const;
  double max_shape_ratio() const;

  // Sorted interior angles; used to detect similarity classes.
  std::array<double, 3> angle_signature(int t) const;

  double total_area() const;

private:
  void build_topology();

  std::vector<Vertex> vertices_;
  std::vector<Triangle> triangles_;
  std::vector<Edge> edges_;
  std::vector<std::array<int, 3>> triangle_edges_;
  double h_max_ = 0.0;
};

// Builds one of the named domains, or validates and labels an explicit triangulation. The
// initial refinement edge of every triangle is its longest edge, ties broken by the
// smallest opposite-vertex index.
Mesh build_initial_mesh(const DomainSpec &domain);

struct Refinement
{
  Mesh mesh;
  // children[t] lists the fine triangles covering coarse triangle t (itself if untouched).
  std::vector<std::vector<int>> children;
  // Endpoints of the edge that was split to create fine vertex coarse.num_vertices() + k.
  std::vector<std::array<int, 2>> new_vertex_parents;
};

// Newest-vertex bisection: every marked triangle is bisected at least ell times, closure
// bisections are added until the mesh is conforming.
Refinement refine(const Mesh &mesh, std::span<const int> marked, int ell = 1);

// Bisects every triangle `rounds` times. Two rounds halve the mesh size.
Mesh refine_uniform(const Mesh &mesh, int rounds);

// Nodal P1 transfer of per-vertex values from coarse to fine.
Vector interpolate(const Mesh &coarse, const Refinement &refinement,
                   std::span<const double> vertex_values);

// True when every edge has at most two incident triangles and no vertex sits at the
// midpoint of a single-sided edge (a hanging node).
bool is_conforming(const Mesh &mesh);

// Accumulates the similarity classes (sorted angle triples, 1e-9 tolerance) seen for each
// initial triangle across any number of meshes derived from it.
class ShapeClassTracker
{
public:
  explicit ShapeClassTracker(std::size_t num_roots, double tol = 1e-9);

  void observe(const Mesh &mesh);
  std::size_t max_classes_per_root() const;
  std::size_t total_classes() const;

private:
  double tol_;
  std::vector<std::vector<std::array<double, 3>>> classes_;
};

// "nv nt", nv lines "x y boundary_flag", nt lines "i j k generation".
void write_mesh(std::ostream &os, const Mesh &mesh);
Mesh read_mesh(std::istream &is);

}  // namespace paro

#endif  // PARO_MESH_HPP
