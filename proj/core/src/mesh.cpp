// Copyright The paro-afem Authors
// SPDX-License-Identifier: Apache-2.0

#include "paro/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <map>
#include <numbers>
#include <ostream>
#include <set>
#include <sstream>
#include <unordered_map>

namespace paro
{

namespace
{

std::uint64_t edge_key(int a, int b)
{
  const auto lo = static_cast<std::uint64_t>(std::min(a, b));
  const auto hi = static_cast<std::uint64_t>(std::max(a, b));
  return (hi << 32) | lo;
}

double distance(Point a, Point b)
{
  return std::hypot(a.x - b.x, a.y - b.y);
}

double signed_area(Point a, Point b, Point c)
{
  return 0.5 * cross(b - a, c - a);
}

// Rotates v so that v[0] is opposite the longest edge; ties go to the smallest
// opposite-vertex index. Rotation keeps the orientation.
std::array<int, 3> label_longest_edge(const std::array<int, 3> &v,
                                      const std::vector<Point> &points)
{
  int best = 0;
  double best_len = -1.0;
  for (int k = 0; k < 3; k++)
  {
    const double len = distance(points[v[(k + 1) % 3]], points[v[(k + 2) % 3]]);
    const bool longer = len > best_len * (1.0 + 1e-12);
    const bool tie = !longer && len >= best_len * (1.0 - 1e-12);
    if (longer || (tie && v[k] < v[best]))
    {
      best = k;
      best_len = std::max(best_len, len);
    }
  }
  return {v[best], v[(best + 1) % 3], v[(best + 2) % 3]};
}

}  // namespace

DomainSpec DomainSpec::from_name(const std::string &name)
{
  if (name == "unit_square")
  {
    return unit_square();
  }
  if (name == "l_shape")
  {
    return l_shape();
  }
  throw Error("unknown domain \"" + name + "\" (expected unit_square or l_shape)");
}

std::string DomainSpec::name() const
{
  switch (kind)
  {
    case Kind::UnitSquare:
      return "unit_square";
    case Kind::LShape:
      return "l_shape";
    case Kind::Explicit:
      return "explicit";
  }
  return "explicit";
}

Mesh::Mesh(std::vector<Vertex> vertices, std::vector<Triangle> triangles)
  : vertices_(std::move(vertices)), triangles_(std::move(triangles))
{
  build_topology();
}

void Mesh::build_topology()
{
  const auto nv = static_cast<int>(vertices_.size());
  std::set<std::array<int, 3>> seen;
  for (std::size_t t = 0; t < triangles_.size(); t++)
  {
    const auto &v = triangles_[t].v;
    for (int k = 0; k < 3; k++)
    {
      if (v[k] < 0 || v[k] >= nv)
      {
        throw Error("triangle " + std::to_string(t) + " references vertex " +
                    std::to_string(v[k]) + " out of range");
      }
    }
    if (v[0] == v[1] || v[1] == v[2] || v[0] == v[2])
    {
      throw Error("triangle " + std::to_string(t) + " repeats a vertex");
    }
    const double a = signed_area(point(v[0]), point(v[1]), point(v[2]));
    if (!(a > 0.0))
    {
      throw Error("triangle " + std::to_string(t) +
                  " is inverted or degenerate (signed area " + std::to_string(a) + ")");
    }
    auto sorted = v;
    std::sort(sorted.begin(), sorted.end());
    if (!seen.insert(sorted).second)
    {
      throw Error("triangle " + std::to_string(t) + " duplicates an earlier triangle");
    }
  }

  edges_.clear();
  triangle_edges_.assign(triangles_.size(), {-1, -1, -1});
  std::unordered_map<std::uint64_t, int> lookup;
  lookup.reserve(3 * triangles_.size());
  for (std::size_t t = 0; t < triangles_.size(); t++)
  {
    const auto &v = triangles_[t].v;
    for (int k = 0; k < 3; k++)
    {
      const int a = v[(k + 1) % 3], b = v[(k + 2) % 3];
      auto [it, inserted] = lookup.try_emplace(edge_key(a, b), static_cast<int>(edges_.size()));
      if (inserted)
      {
        Edge e;
        e.v = {a, b};
        e.tri = {static_cast<int>(t), -1};
        edges_.push_back(e);
      }
      else
      {
        Edge &e = edges_[it->second];
        if (e.tri[1] >= 0)
        {
          throw Error("edge (" + std::to_string(a) + ", " + std::to_string(b) +
                      ") is shared by more than two triangles");
        }
        e.tri[1] = static_cast<int>(t);
      }
      triangle_edges_[t][k] = it->second;
    }
  }

  for (auto &vtx : vertices_)
  {
    vtx.on_boundary = false;
  }
  for (auto &e : edges_)
  {
    const Point a = point(e.v[0]), b = point(e.v[1]);
    const double len = distance(a, b);
    Point n{(b.y - a.y) / len, -(b.x - a.x) / len};
    // Orient as the outward normal of the owning triangle (T- when interior).
    const int owner = e.interior() ? e.tri[1] : e.tri[0];
    const auto &v = triangles_[owner].v;
    const Point centroid = (1.0 / 3.0) * (point(v[0]) + point(v[1]) + point(v[2]));
    if (dot(n, centroid - a) > 0.0)
    {
      n = -1.0 * n;
    }
    e.normal = n;
    if (!e.interior())
    {
      vertices_[e.v[0]].on_boundary = true;
      vertices_[e.v[1]].on_boundary = true;
    }
  }

  h_max_ = 0.0;
  for (std::size_t t = 0; t < triangles_.size(); t++)
  {
    h_max_ = std::max(h_max_, diameter(static_cast<int>(t)));
  }
}

std::array<Point, 3> Mesh::corners(int t) const
{
  const auto &v = triangles_[t].v;
  return {point(v[0]), point(v[1]), point(v[2])};
}

double Mesh::area(int t) const
{
  const auto p = corners(t);
  return signed_area(p[0], p[1], p[2]);
}

double Mesh::diameter(int t) const
{
  const auto p = corners(t);
  return std::max({distance(p[0], p[1]), distance(p[1], p[2]), distance(p[2], p[0])});
}

double Mesh::edge_length(int e) const
{
  return distance(point(edges_[e].v[0]), point(edges_[e].v[1]));
}

double Mesh::shape_ratio(int t) const
{
  const auto p = corners(t);
  const double perimeter = distance(p[0], p[1]) + distance(p[1], p[2]) + distance(p[2], p[0]);
  const double inscribed_diameter = 4.0 * area(t) / perimeter;
  return diameter(t) / inscribed_diameter;
}

double Mesh::max_shape_ratio() const
{
  double r = 0.0;
  for (std::size_t t = 0; t < triangles_.size(); t++)
  {
    r = std::max(r, shape_ratio(static_cast<int>(t)));
  }
  return r;
}

std::array<double, 3> Mesh::angle_signature(int t) const
{
  const auto p = corners(t);
  std::array<double, 3> angles{};
  for (int k = 0; k < 3; k++)
  {
    const Point u = p[(k + 1) % 3] - p[k], w = p[(k + 2) % 3] - p[k];
    angles[k] = std::atan2(std::abs(cross(u, w)), dot(u, w));
  }
  std::sort(angles.begin(), angles.end());
  return angles;
}

double Mesh::total_area() const
{
  double a = 0.0;
  for (std::size_t t = 0; t < triangles_.size(); t++)
  {
    a += area(static_cast<int>(t));
  }
  return a;
}

Mesh build_initial_mesh(const DomainSpec &domain)
{
  std::vector<Point> points;
  std::vector<std::array<int, 3>> tris;
  switch (domain.kind)
  {
    case DomainSpec::Kind::UnitSquare:
      points = {{0, 0}, {1, 0}, {1, 1}, {0, 1}};
      tris = {{0, 1, 2}, {0, 2, 3}};
      break;
    case DomainSpec::Kind::LShape:
      // (-1,1)^2 minus [0,1) x (-1,0]; every diagonal passes through the reentrant corner.
      points = {{-1, -1}, {0, -1}, {-1, 0}, {0, 0}, {1, 0}, {-1, 1}, {0, 1}, {1, 1}};
      tris = {{0, 1, 3}, {0, 3, 2}, {2, 3, 5}, {3, 6, 5}, {3, 4, 7}, {3, 7, 6}};
      break;
    case DomainSpec::Kind::Explicit:
      points = domain.points;
      tris = domain.triangles;
      break;
  }

  std::vector<Vertex> vertices;
  vertices.reserve(points.size());
  for (const auto &p : points)
  {
    if (!std::isfinite(p.x) || !std::isfinite(p.y))
    {
      throw Error("vertex coordinates must be finite");
    }
    vertices.push_back({p.x, p.y, false});
  }
  std::vector<Triangle> triangles;
  triangles.reserve(tris.size());
  for (std::size_t t = 0; t < tris.size(); t++)
  {
    for (int k = 0; k < 3; k++)
    {
      if (tris[t][k] < 0 || tris[t][k] >= static_cast<int>(points.size()))
      {
        throw Error("triangle " + std::to_string(t) + " references vertex " +
                    std::to_string(tris[t][k]) + " out of range");
      }
    }
    Triangle tri;
    tri.v = label_longest_edge(tris[t], points);
    tri.generation = 0;
    tri.root = static_cast<int>(t);
    triangles.push_back(tri);
  }
  return Mesh(std::move(vertices), std::move(triangles));
}

namespace
{

struct BisectionRound
{
  std::vector<Vertex> vertices;
  std::vector<Triangle> triangles;
  std::vector<std::vector<int>> children;
  std::vector<std::array<int, 2>> new_vertex_parents;
};

// One round of newest-vertex bisection with closure: the refinement edge of every marked
// triangle is marked, then marks propagate until each triangle with any marked edge also
// has its refinement edge marked. Each triangle is then split into 2, 3 or 4 children.
BisectionRound bisect_once(const Mesh &mesh, const std::vector<char> &marked)
{
  const auto &edges = mesh.edges();
  std::vector<char> edge_marked(edges.size(), 0);
  std::vector<int> stack;
  auto mark_edge = [&](int e)
  {
    if (!edge_marked[e])
    {
      edge_marked[e] = 1;
      stack.push_back(e);
    }
  };
  // Local slot 0 (opposite the peak) is the refinement edge.
  for (std::size_t t = 0; t < mesh.num_triangles(); t++)
  {
    if (marked[t])
    {
      mark_edge(mesh.triangle_edges(static_cast<int>(t))[0]);
    }
  }
  while (!stack.empty())
  {
    const int e = stack.back();
    stack.pop_back();
    for (int t : edges[e].tri)
    {
      if (t >= 0)
      {
        mark_edge(mesh.triangle_edges(t)[0]);
      }
    }
  }

  BisectionRound out;
  out.vertices = mesh.vertices();
  std::vector<int> midpoint(edges.size(), -1);
  for (std::size_t e = 0; e < edges.size(); e++)
  {
    if (!edge_marked[e])
    {
      continue;
    }
    const Point a = mesh.point(edges[e].v[0]), b = mesh.point(edges[e].v[1]);
    midpoint[e] = static_cast<int>(out.vertices.size());
    out.vertices.push_back({0.5 * (a.x + b.x), 0.5 * (a.y + b.y), !edges[e].interior()});
    out.new_vertex_parents.push_back(edges[e].v);
  }

  std::unordered_map<std::uint64_t, int> coarse_edge;
  coarse_edge.reserve(edges.size());
  for (std::size_t e = 0; e < edges.size(); e++)
  {
    coarse_edge.emplace(edge_key(edges[e].v[0], edges[e].v[1]), static_cast<int>(e));
  }
  auto split_of = [&](int a, int b) -> int
  {
    auto it = coarse_edge.find(edge_key(a, b));
    return it == coarse_edge.end() ? -1 : midpoint[it->second];
  };

  out.children.resize(mesh.num_triangles());
  for (std::size_t t = 0; t < mesh.num_triangles(); t++)
  {
    const Triangle &parent = mesh.triangles()[t];
    auto &kids = out.children[t];
    const int m = midpoint[mesh.triangle_edges(static_cast<int>(t))[0]];
    if (m < 0)
    {
      kids.push_back(static_cast<int>(out.triangles.size()));
      out.triangles.push_back(parent);
      continue;
    }
    const int p = parent.v[0], a = parent.v[1], b = parent.v[2];
    // (p, a, b) -> (m, p, a) and (m, b, p); the children's refinement edges are the
    // parent's remaining edges (p, a) and (b, p).
    const std::array<Triangle, 2> halves{
        Triangle{{m, p, a}, parent.generation + 1, parent.root},
        Triangle{{m, b, p}, parent.generation + 1, parent.root}};
    for (const Triangle &child : halves)
    {
      const int mm = split_of(child.v[1], child.v[2]);
      if (mm < 0)
      {
        kids.push_back(static_cast<int>(out.triangles.size()));
        out.triangles.push_back(child);
        continue;
      }
      const int q = child.v[0], c = child.v[1], d = child.v[2];
      kids.push_back(static_cast<int>(out.triangles.size()));
      out.triangles.push_back({{mm, q, c}, child.generation + 1, child.root});
      kids.push_back(static_cast<int>(out.triangles.size()));
      out.triangles.push_back({{mm, d, q}, child.generation + 1, child.root});
    }
  }
  return out;
}

}  // namespace

Refinement refine(const Mesh &mesh, std::span<const int> marked, int ell)
{
  if (ell < 1)
  {
    throw Error("refine: ell must be >= 1");
  }
  const auto nt = static_cast<int>(mesh.num_triangles());
  Refinement result;
  result.children.resize(mesh.num_triangles());
  for (int t = 0; t < nt; t++)
  {
    result.children[t] = {t};
  }
  if (marked.empty())
  {
    result.mesh = mesh;
    return result;
  }

  // active[t] holds the current-mesh descendants of originally marked triangles.
  std::vector<char> flags(mesh.num_triangles(), 0);
  for (int t : marked)
  {
    if (t < 0 || t >= nt)
    {
      throw Error("refine: marked element " + std::to_string(t) + " out of range");
    }
    flags[t] = 1;
  }

  Mesh current = mesh;
  for (int round = 0; round < ell; round++)
  {
    BisectionRound step = bisect_once(current, flags);
    std::vector<char> next_flags(step.triangles.size(), 0);
    for (std::size_t t = 0; t < step.children.size(); t++)
    {
      if (flags[t])
      {
        for (int c : step.children[t])
        {
          next_flags[c] = 1;
        }
      }
    }
    for (auto &kids : result.children)
    {
      std::vector<int> composed;
      for (int k : kids)
      {
        composed.insert(composed.end(), step.children[k].begin(), step.children[k].end());
      }
      kids = std::move(composed);
    }
    result.new_vertex_parents.insert(result.new_vertex_parents.end(),
                                     step.new_vertex_parents.begin(),
                                     step.new_vertex_parents.end());
    current = Mesh(std::move(step.vertices), std::move(step.triangles));
    flags = std::move(next_flags);
  }
  result.mesh = std::move(current);
  return result;
}

Mesh refine_uniform(const Mesh &mesh, int rounds)
{
  Mesh current = mesh;
  for (int r = 0; r < rounds; r++)
  {
    std::vector<int> all(current.num_triangles());
    for (std::size_t t = 0; t < all.size(); t++)
    {
      all[t] = static_cast<int>(t);
    }
    current = refine(current, all, 1).mesh;
  }
  return current;
}

Vector interpolate(const Mesh &coarse, const Refinement &refinement,
                   std::span<const double> vertex_values)
{
  if (vertex_values.size() != coarse.num_vertices())
  {
    throw Error("interpolate: expected " + std::to_string(coarse.num_vertices()) +
                " vertex values, got " + std::to_string(vertex_values.size()));
  }
  const std::size_t nf = refinement.mesh.num_vertices();
  if (nf != coarse.num_vertices() + refinement.new_vertex_parents.size())
  {
    throw Error("interpolate: refinement does not belong to this coarse mesh");
  }
  Vector fine(nf);
  std::copy(vertex_values.begin(), vertex_values.end(), fine.begin());
  // Parents always precede children in creation order.
  for (std::size_t k = 0; k < refinement.new_vertex_parents.size(); k++)
  {
    const auto [a, b] = refinement.new_vertex_parents[k];
    fine[coarse.num_vertices() + k] = 0.5 * (fine[a] + fine[b]);
  }
  return fine;
}

bool is_conforming(const Mesh &mesh)
{
  // Rebuilding the topology throws on edges with more than two triangles.
  try
  {
    Mesh rebuilt(mesh.vertices(), mesh.triangles());
    if (rebuilt.edges().size() != mesh.edges().size())
    {
      return false;
    }
  }
  catch (const Error &)
  {
    return false;
  }
  std::set<std::pair<double, double>> coords;
  for (const auto &v : mesh.vertices())
  {
    coords.emplace(v.x, v.y);
  }
  for (const auto &e : mesh.edges())
  {
    if (e.interior())
    {
      continue;
    }
    const Point a = mesh.point(e.v[0]), b = mesh.point(e.v[1]);
    if (coords.count({0.5 * (a.x + b.x), 0.5 * (a.y + b.y)}))
    {
      return false;
    }
  }
  return true;
}

ShapeClassTracker::ShapeClassTracker(std::size_t num_roots, double tol)
  : tol_(tol), classes_(num_roots)
{
}

void ShapeClassTracker::observe(const Mesh &mesh)
{
  for (std::size_t t = 0; t < mesh.num_triangles(); t++)
  {
    const auto sig = mesh.angle_signature(static_cast<int>(t));
    auto &known = classes_.at(mesh.triangles()[t].root);
    const bool found = std::any_of(known.begin(), known.end(),
                                   [&](const std::array<double, 3> &c)
                                   {
                                     return std::abs(c[0] - sig[0]) <= tol_ &&
                                            std::abs(c[1] - sig[1]) <= tol_ &&
                                            std::abs(c[2] - sig[2]) <= tol_;
                                   });
    if (!found)
    {
      known.push_back(sig);
    }
  }
}

std::size_t ShapeClassTracker::max_classes_per_root() const
{
  std::size_t m = 0;
  for (const auto &c : classes_)
  {
    m = std::max(m, c.size());
  }
  return m;
}

std::size_t ShapeClassTracker::total_classes() const
{
  std::size_t n = 0;
  for (const auto &c : classes_)
  {
    n += c.size();
  }
  return n;
}

void write_mesh(std::ostream &os, const Mesh &mesh)
{
  os.precision(17);
  os << mesh.num_vertices() << ' ' << mesh.num_triangles() << '\n';
  for (const auto &v : mesh.vertices())
  {
    os << v.x << ' ' << v.y << ' ' << (v.on_boundary ? 1 : 0) << '\n';
  }
  for (const auto &t : mesh.triangles())
  {
    os << t.v[0] << ' ' << t.v[1] << ' ' << t.v[2] << ' ' << t.generation << '\n';
  }
}

Mesh read_mesh(std::istream &is)
{
  std::size_t nv = 0, nt = 0;
  if (!(is >> nv >> nt))
  {
    throw Error("read_mesh: missing \"nv nt\" header");
  }
  std::vector<Vertex> vertices(nv);
  for (std::size_t i = 0; i < nv; i++)
  {
    int flag = 0;
    if (!(is >> vertices[i].x >> vertices[i].y >> flag))
    {
      throw Error("read_mesh: truncated vertex list at vertex " + std::to_string(i));
    }
  }
  std::vector<Triangle> triangles(nt);
  for (std::size_t t = 0; t < nt; t++)
  {
    auto &tri = triangles[t];
    if (!(is >> tri.v[0] >> tri.v[1] >> tri.v[2] >> tri.generation))
    {
      throw Error("read_mesh: truncated triangle list at triangle " + std::to_string(t));
    }
    tri.root = static_cast<int>(t);
  }
  return Mesh(std::move(vertices), std::move(triangles));
}

}  // namespace paro
