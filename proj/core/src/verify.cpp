// Copyright The paro-afem Authors
// SPDX-License-Identifier: Apache-2.0

#include "paro/verify.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <Eigen/Dense>
#include <Eigen/SparseCholesky>
#include "paro/dense.hpp"

namespace paro
{

namespace
{

using EigenSparse = Eigen::SparseMatrix<double>;

EigenSparse to_eigen_lower(const SparseSymMatrix &a)
{
  std::vector<Eigen::Triplet<double>> t;
  t.reserve(a.stored_nonzeros());
  for (std::size_t i = 0; i < a.dim(); i++)
  {
    for (std::size_t k = a.row_ptr()[i]; k < a.row_ptr()[i + 1]; k++)
    {
      t.emplace_back(static_cast<int>(i), a.col_idx()[k], a.values()[k]);
    }
  }
  const auto n = static_cast<Eigen::Index>(a.dim());
  EigenSparse m(n, n);
  m.setFromTriplets(t.begin(), t.end());
  return m;
}

Eigen::MatrixXd to_eigen_dense(const SparseSymMatrix &a)
{
  const auto n = static_cast<Eigen::Index>(a.dim());
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(n, n);
  for (std::size_t i = 0; i < a.dim(); i++)
  {
    for (std::size_t k = a.row_ptr()[i]; k < a.row_ptr()[i + 1]; k++)
    {
      const auto j = a.col_idx()[k];
      m(static_cast<Eigen::Index>(i), j) = a.values()[k];
      m(j, static_cast<Eigen::Index>(i)) = a.values()[k];
    }
  }
  return m;
}

Eigen::VectorXd apply(const SparseSymMatrix &a, const Eigen::VectorXd &x)
{
  Eigen::VectorXd y(x.size());
  a.multiply(std::span<const double>(x.data(), static_cast<std::size_t>(x.size())),
             std::span<double>(y.data(), static_cast<std::size_t>(y.size())));
  return y;
}

Vector to_vector(const Eigen::VectorXd &x)
{
  return Vector(x.data(), x.data() + x.size());
}

double relative_residual(const FemSystem &sys, double lambda, const Eigen::VectorXd &x,
                         double k_norm)
{
  const Eigen::VectorXd r = apply(sys.stiffness, x) - lambda * apply(sys.mass, x);
  return r.norm() / (k_norm * x.norm());
}

// Rayleigh-Ritz on the columns of y (each normalized first); returns M-orthonormal Ritz
// vectors and ascending values.
std::pair<Eigen::VectorXd, Eigen::MatrixXd> rayleigh_ritz(const FemSystem &sys,
                                                          Eigen::MatrixXd y)
{
  const Eigen::Index p = y.cols();
  Eigen::MatrixXd ky(y.rows(), p), my(y.rows(), p);
  for (Eigen::Index j = 0; j < p; j++)
  {
    my.col(j) = apply(sys.mass, y.col(j));
    const double s = 1.0 / std::sqrt(y.col(j).dot(my.col(j)));
    y.col(j) *= s;
    my.col(j) *= s;
    ky.col(j) = apply(sys.stiffness, y.col(j));
  }
  Eigen::MatrixXd a = y.transpose() * ky;
  Eigen::MatrixXd b = y.transpose() * my;
  a = 0.5 * (a + a.transpose()).eval();
  b = 0.5 * (b + b.transpose()).eval();
  Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> es(a, b);
  if (es.info() != Eigen::Success)
  {
    throw Error("reference_eig: Rayleigh-Ritz pencil is not definite (block lost rank)");
  }
  return {es.eigenvalues(), y * es.eigenvectors()};
}

Eigen::MatrixXd columns(std::span<const Vector> v)
{
  const auto n = static_cast<Eigen::Index>(v.empty() ? 0 : v[0].size());
  Eigen::MatrixXd m(n, static_cast<Eigen::Index>(v.size()));
  for (std::size_t j = 0; j < v.size(); j++)
  {
    if (static_cast<Eigen::Index>(v[j].size()) != n)
    {
      throw Error("vector " + std::to_string(j) + " has inconsistent length");
    }
    m.col(static_cast<Eigen::Index>(j)) = Eigen::Map<const Eigen::VectorXd>(v[j].data(), n);
  }
  return m;
}

// a-orthonormal basis of span(v); throws on rank deficiency.
std::vector<Vector> a_orthonormal(const FemSystem &sys, std::span<const Vector> v,
                                  const char *what)
{
  try
  {
    return b_orthonormalize(v, sys.stiffness);
  }
  catch (const Error &e)
  {
    throw Error(std::string(what) + ": vector set is rank deficient (" + e.what() + ")");
  }
}

// Energy-norm distance between the a-unit vectors x and y's span.
double line_distance(const FemSystem &sys, const Vector &x, const Vector &y)
{
  const Vector ky = sys.stiffness * y;
  Vector r = x;
  axpy(-dot(x, ky), y, r);
  return std::sqrt(std::max(inner(sys.stiffness, r, r), 0.0));
}

// Degree-5, 7-point rule on the reference triangle (barycentric points, unit weight sum).
const QuadratureRule &rule7()
{
  static const QuadratureRule r = []
  {
    QuadratureRule q;
    const double a = 0.059715871789770, b = 0.470142064105115;
    const double c = 0.797426985353087, d = 0.101286507323456;
    const double wa = 0.132394152788506, wc = 0.125939180544827;
    q.points = {{1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0}, {a, b, b}, {b, a, b}, {b, b, a},
                {c, d, d}, {d, c, d}, {d, d, c}};
    q.weights = {0.225, wa, wa, wa, wc, wc, wc};
    return q;
  }();
  return r;
}

}  // namespace

ReferencePairs reference_eig(const FemSystem &sys, std::size_t n, const ReferenceOptions &options)
{
  const std::size_t guard = options.guard > 0 ? options.guard : std::max<std::size_t>(4, n);
  const std::size_t p = std::min(sys.n_dofs(), n + guard);
  std::mt19937_64 rng(options.seed);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  std::vector<Vector> start(p, Vector(sys.n_dofs()));
  for (auto &v : start)
  {
    for (double &x : v)
    {
      x = dist(rng);
    }
  }
  return reference_eig(sys, n, start, options);
}

ReferencePairs reference_eig(const FemSystem &sys, std::size_t n, std::span<const Vector> start,
                             const ReferenceOptions &options)
{
  const std::size_t ndofs = sys.n_dofs();
  if (n == 0 || n >= ndofs)
  {
    throw Error("reference_eig: need 0 < N < n_dofs (N = " + std::to_string(n) +
                ", n_dofs = " + std::to_string(ndofs) + ")");
  }
  if (start.size() < n)
  {
    throw Error("reference_eig: start block has fewer than N columns");
  }
  const double k_norm = sys.stiffness.norm_inf();
  ReferencePairs out;

  const std::size_t p = start.size();
  if (2 * p >= ndofs)
  {
    Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> es(to_eigen_dense(sys.stiffness),
                                                                 to_eigen_dense(sys.mass));
    if (es.info() != Eigen::Success)
    {
      throw Error("reference_eig: dense generalized eigensolver failed");
    }
    for (std::size_t k = 0; k < n; k++)
    {
      const auto kk = static_cast<Eigen::Index>(k);
      const Eigen::VectorXd v = es.eigenvectors().col(kk);
      out.values.push_back(es.eigenvalues()(kk));
      out.vectors.push_back(to_vector(v));
      out.residuals.push_back(relative_residual(sys, out.values.back(), v, k_norm));
    }
    return out;
  }

  Eigen::SimplicialLDLT<EigenSparse, Eigen::Lower> ldlt(to_eigen_lower(sys.stiffness));
  if (ldlt.info() != Eigen::Success)
  {
    throw Error("reference_eig: stiffness factorization failed");
  }

  auto [values, x] = rayleigh_ritz(sys, columns(start));
  Eigen::VectorXd residuals(static_cast<Eigen::Index>(n));
  std::size_t locked = 0;
  for (int it = 1; it <= options.max_iter; it++)
  {
    Eigen::MatrixXd y = x;
    for (Eigen::Index j = static_cast<Eigen::Index>(locked); j < x.cols(); j++)
    {
      y.col(j) = ldlt.solve(apply(sys.mass, x.col(j)));
    }
    std::tie(values, x) = rayleigh_ritz(sys, std::move(y));
    locked = 0;
    bool all = true;
    for (std::size_t k = 0; k < n; k++)
    {
      const auto kk = static_cast<Eigen::Index>(k);
      residuals(kk) = relative_residual(sys, values(kk), x.col(kk), k_norm);
      const bool ok = residuals(kk) <= options.tol;
      all = all && ok;
      if (ok && locked == k)
      {
        locked = k + 1;
      }
    }
    out.iterations = it;
    if (all)
    {
      for (std::size_t k = 0; k < n; k++)
      {
        const auto kk = static_cast<Eigen::Index>(k);
        out.values.push_back(values(kk));
        out.vectors.push_back(to_vector(x.col(kk)));
        out.residuals.push_back(residuals(kk));
      }
      return out;
    }
  }
  std::string msg = "reference_eig: no convergence in " + std::to_string(options.max_iter) +
                    " iterations; residuals";
  for (Eigen::Index k = 0; k < residuals.size(); k++)
  {
    msg += " " + std::to_string(residuals(k));
  }
  throw Error(msg);
}

double dist_a(const FemSystem &sys, std::span<const Vector> x, std::span<const Vector> y)
{
  if (x.empty() || y.empty())
  {
    throw Error("dist_a: empty vector set");
  }
  const auto qx = a_orthonormal(sys, x, "dist_a");
  const auto qy = a_orthonormal(sys, y, "dist_a");
  // Residual of projecting each x basis vector onto Y; dist^2 is the top eigenvalue of its
  // energy Gram matrix.
  std::vector<Vector> r = qx;
  for (const auto &b : qy)
  {
    const Vector kb = sys.stiffness * b;
    for (auto &v : r)
    {
      axpy(-dot(v, kb), b, v);
    }
  }
  // Second pass against rounding.
  for (const auto &b : qy)
  {
    const Vector kb = sys.stiffness * b;
    for (auto &v : r)
    {
      axpy(-dot(v, kb), b, v);
    }
  }
  const DenseMatrix g = gram(r, sys.stiffness);
  Eigen::MatrixXd ge(static_cast<Eigen::Index>(g.rows()), static_cast<Eigen::Index>(g.cols()));
  for (std::size_t i = 0; i < g.rows(); i++)
  {
    for (std::size_t j = 0; j < g.cols(); j++)
    {
      ge(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = g(i, j);
    }
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(ge, Eigen::EigenvaluesOnly);
  const double top = es.eigenvalues().maxCoeff();
  return std::sqrt(std::clamp(top, 0.0, 1.0));
}

Vector project_a(const FemSystem &sys, std::span<const double> v, std::span<const Vector> y)
{
  if (v.size() != sys.n_dofs())
  {
    throw Error("project_a: vector length does not match n_dofs");
  }
  const auto qy = a_orthonormal(sys, y, "project_a");
  const Vector kv = sys.stiffness * v;
  Vector p(v.size(), 0.0);
  for (const auto &b : qy)
  {
    axpy(dot(b, kv), b, p);
  }
  return p;
}

AnalyticSpectrum analytic_spectrum(const DomainSpec &domain, std::size_t count)
{
  if (domain.kind != DomainSpec::Kind::UnitSquare)
  {
    throw Error("analytic_spectrum: no closed form for domain '" + domain.name() + "'");
  }
  std::vector<std::pair<int, int>> modes;
  // At least `count` lattice points satisfy m^2 + n^2 <= max_sq.
  const int max_sq = 4 * static_cast<int>(count) + 10;
  for (int m = 1; m * m < max_sq; m++)
  {
    for (int n = 1; m * m + n * n <= max_sq; n++)
    {
      modes.emplace_back(m, n);
    }
  }
  std::stable_sort(modes.begin(), modes.end(),
                   [](auto a, auto b)
                   {
                     const int sa = a.first * a.first + a.second * a.second;
                     const int sb = b.first * b.first + b.second * b.second;
                     return sa != sb ? sa < sb : a.first < b.first;
                   });
  AnalyticSpectrum s;
  const double pi2 = std::numbers::pi * std::numbers::pi;
  int last = -1;
  for (std::size_t k = 0; k < count && k < modes.size(); k++)
  {
    const auto [m, n] = modes[k];
    const int sq = m * m + n * n;
    s.values.push_back(pi2 * sq);
    s.modes.push_back(modes[k]);
    if (sq == last)
    {
      s.multiplicities.back()++;
    }
    else
    {
      s.multiplicities.push_back(1);
      last = sq;
    }
  }
  return s;
}

Vector sample_unit_square_mode(const Mesh &mesh, const FemSystem &sys, int m, int n)
{
  Vector nodal(mesh.num_vertices());
  for (std::size_t i = 0; i < nodal.size(); i++)
  {
    const auto &v = mesh.vertices()[i];
    nodal[i] = std::sin(m * std::numbers::pi * v.x) * std::sin(n * std::numbers::pi * v.y);
  }
  Vector u = sys.restrict(nodal);
  const double norm = mass_norm(sys, u);
  if (norm > 0.0)
  {
    scale(1.0 / norm, u);
  }
  return u;
}

double analytic_subspace_distance(const Mesh &mesh, const FemSystem &sys,
                                  std::span<const std::pair<int, int>> modes)
{
  if (modes.empty())
  {
    throw Error("analytic_subspace_distance: no modes");
  }
  Eigen::SimplicialLDLT<EigenSparse, Eigen::Lower> ldlt(to_eigen_lower(sys.stiffness));
  if (ldlt.info() != Eigen::Success)
  {
    throw Error("analytic_subspace_distance: stiffness factorization failed");
  }
  const QuadratureRule &rule = rule7();
  const auto nd = static_cast<Eigen::Index>(sys.n_dofs());
  // Ritz projections of the a-normalized exact eigenfunctions e_k = u_k / ||u_k||_a, with
  // ||sin sin||_a^2 = lambda / 4.
  std::vector<Eigen::VectorXd> proj;
  for (const auto &[m, n] : modes)
  {
    const double lambda = std::numbers::pi * std::numbers::pi * (m * m + n * n);
    const double scale_a = 1.0 / std::sqrt(lambda / 4.0);
    Eigen::VectorXd load = Eigen::VectorXd::Zero(nd);
    for (std::size_t t = 0; t < mesh.num_triangles(); t++)
    {
      const auto p = mesh.corners(static_cast<int>(t));
      const auto &v = mesh.triangles()[t].v;
      const double area = mesh.area(static_cast<int>(t));
      for (std::size_t q = 0; q < rule.points.size(); q++)
      {
        const auto &l = rule.points[q];
        const Point x = l[0] * p[0] + l[1] * p[1] + l[2] * p[2];
        const double u =
          std::sin(m * std::numbers::pi * x.x) * std::sin(n * std::numbers::pi * x.y);
        const double f = lambda * scale_a * u * rule.weights[q] * area;
        for (int i = 0; i < 3; i++)
        {
          const int d = sys.dof_of_vertex[v[i]];
          if (d >= 0)
          {
            load(d) += f * l[i];
          }
        }
      }
    }
    proj.push_back(ldlt.solve(load));
  }
  // Error Gram in the a-orthonormal basis {e_k}: I - (P e_k)^T K (P e_l).
  const auto nm = static_cast<Eigen::Index>(modes.size());
  Eigen::MatrixXd e = Eigen::MatrixXd::Identity(nm, nm);
  for (Eigen::Index i = 0; i < nm; i++)
  {
    const Eigen::VectorXd kp = apply(sys.stiffness, proj[i]);
    for (Eigen::Index j = 0; j < nm; j++)
    {
      e(i, j) -= proj[j].dot(kp);
    }
  }
  e = 0.5 * (e + e.transpose()).eval();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(e, Eigen::EigenvaluesOnly);
  return std::sqrt(std::clamp(es.eigenvalues().maxCoeff(), 0.0, 1.0));
}

namespace
{

RateFit least_squares(std::span<const double> x, std::span<const double> y)
{
  const double n = static_cast<double>(x.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); i++)
  {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); i++)
  {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (sxx == 0.0)
  {
    throw Error("fit: abscissae are all equal");
  }
  RateFit f;
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  f.r_squared = syy == 0.0 ? 1.0 : (sxy * sxy) / (sxx * syy);
  return f;
}

void check_samples(std::span<const double> x, std::span<const double> y, bool log_x)
{
  if (x.size() != y.size())
  {
    throw Error("fit: x and y differ in length");
  }
  if (x.size() < 3)
  {
    throw Error("fit: need at least 3 samples");
  }
  for (std::size_t i = 0; i < x.size(); i++)
  {
    if (!(y[i] > 0.0) || (log_x && !(x[i] > 0.0)))
    {
      throw Error("fit: sample " + std::to_string(i) + " is not positive");
    }
  }
}

}  // namespace

RateFit fit_rate(std::span<const double> x, std::span<const double> y)
{
  check_samples(x, y, true);
  Vector lx(x.size()), ly(y.size());
  std::transform(x.begin(), x.end(), lx.begin(), [](double v) { return std::log(v); });
  std::transform(y.begin(), y.end(), ly.begin(), [](double v) { return std::log(v); });
  return least_squares(lx, ly);
}

RateFit fit_semilog(std::span<const double> x, std::span<const double> y)
{
  check_samples(x, y, false);
  Vector ly(y.size());
  std::transform(y.begin(), y.end(), ly.begin(), [](double v) { return std::log(v); });
  return least_squares(x, ly);
}

double matched_basis_bound(std::size_t d, double dist)
{
  // 2 - 2 sqrt(1 - s^2) written without cancellation.
  const double s2 = dist * dist;
  const double inner = 2.0 * s2 / (1.0 + std::sqrt(std::max(0.0, 1.0 - s2)));
  return (1.0 + std::sqrt(static_cast<double>(d))) * std::sqrt(inner);
}

QuasiOrthogonalityReport quasi_orthogonality_report(const FemSystem &sys,
                                                    const OrbitalBlock &block,
                                                    const ReferencePairs &ref,
                                                    const ClusterLayout &layout)
{
  if (layout.size() != block.size() || ref.values.size() < block.size() ||
      ref.vectors.size() < block.size())
  {
    throw Error("quasi_orthogonality_report: block, reference and layout sizes differ");
  }
  QuasiOrthogonalityReport report;
  report.g = INFINITY;
  for (std::size_t i = 0; i < layout.num_clusters(); i++)
  {
    const std::size_t first = layout.offset(i);
    const auto d = static_cast<std::size_t>(layout.multiplicities()[i]);
    const std::span<const Vector> xs(ref.vectors.data() + first, d);
    const std::span<const Vector> ys(block.vectors.data() + first, d);

    ClusterReport c;
    c.dist_a = dist_a(sys, xs, ys);
    for (std::size_t j = 0; j < d; j++)
    {
      c.max_eigenvalue_gap =
        std::max(c.max_eigenvalue_gap,
                 std::abs(ref.values[first + j] - block.ritz_values[first + j]));
    }

    // Orthogonal Procrustes: rotate the block basis to best match the reference basis.
    const auto qx = a_orthonormal(sys, xs, "quasi_orthogonality_report");
    const auto qy = a_orthonormal(sys, ys, "quasi_orthogonality_report");
    const auto dd = static_cast<Eigen::Index>(d);
    Eigen::MatrixXd cross(dd, dd);
    for (std::size_t r = 0; r < d; r++)
    {
      const Vector kr = sys.stiffness * qy[r];
      for (std::size_t s = 0; s < d; s++)
      {
        cross(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(s)) = dot(kr, qx[s]);
      }
    }
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(cross, Eigen::ComputeFullU | Eigen::ComputeFullV);
    const Eigen::MatrixXd w = svd.matrixU() * svd.matrixV().transpose();
    DenseMatrix wd(d, d);
    for (std::size_t r = 0; r < d; r++)
    {
      for (std::size_t s = 0; s < d; s++)
      {
        wd(r, s) = w(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(s));
      }
    }
    const auto matched = combine(qy, wd);
    c.bound = matched_basis_bound(d, c.dist_a);
    for (std::size_t j = 0; j < d; j++)
    {
      const double dj = line_distance(sys, qx[j], matched[j]);
      c.matched_distances.push_back(dj);
      // Absolute slack covers rounding in both sides when the distances are at noise level.
      if (dj > c.bound + 1e-13)
      {
        c.bound_holds = false;
      }
    }
    report.all_bounds_hold = report.all_bounds_hold && c.bound_holds;
    report.gamma = std::max(report.gamma, ref.values[first + d - 1] - ref.values[first]);
    const std::size_t next = first + d;
    if (next < ref.values.size())
    {
      report.g = std::min(report.g, ref.values[next] - ref.values[next - 1]);
    }
    report.clusters.push_back(std::move(c));
  }
  return report;
}

}  // namespace paro
