// Copyright The paro-afem Authors
// SPDX-License-Identifier: Apache-2.0

#include "paro/io.hpp"

#include <cmath>
#include <istream>
#include <ostream>

namespace paro
{

void write_history_csv(std::ostream &os, std::span<const RunEntry> entries)
{
  const std::size_t n = entries.empty() ? 0 : entries.front().ritz_values.size();
  os << "n,n_dofs,n_elements,global_estimator_sq,m_used,minres_iterations,delta1,multiplicities";
  for (std::size_t k = 1; k <= n; k++)
  {
    os << ",lambda_" << k;
  }
  os << '\n';
  for (const auto &e : entries)
  {
    os << e.n << ',' << e.n_dofs << ',' << e.n_elements << ','
       << format_double(e.global_estimator_sq) << ',' << e.m_used << ',' << e.minres_iterations
       << ',' << (std::isnan(e.delta1) ? std::string() : format_double(e.delta1)) << ',';
    for (std::size_t i = 0; i < e.multiplicities.size(); i++)
    {
      os << (i ? ";" : "") << e.multiplicities[i];
    }
    for (double v : e.ritz_values)
    {
      os << ',' << format_double(v);
    }
    os << '\n';
  }
}

void write_timing_csv(std::ostream &os, std::span<const RunEntry> entries)
{
  os << "n,wall_time\n";
  for (const auto &e : entries)
  {
    os << e.n << ',' << format_double(e.wall_time) << '\n';
  }
}

void write_vectors(std::ostream &os, std::span<const Vector> vectors, std::size_t n_dofs)
{
  os << n_dofs << '\n';
  for (const auto &v : vectors)
  {
    if (v.size() != n_dofs)
    {
      throw Error("write_vectors: vector length differs from n_dofs");
    }
    for (double x : v)
    {
      os << format_double(x) << '\n';
    }
  }
}

std::vector<Vector> read_vectors(std::istream &is)
{
  std::size_t n_dofs = 0;
  if (!(is >> n_dofs))
  {
    throw Error("read_vectors: missing n_dofs header");
  }
  std::vector<Vector> out;
  Vector current;
  double x;
  while (is >> x)
  {
    current.push_back(x);
    if (current.size() == n_dofs)
    {
      out.push_back(std::move(current));
      current.clear();
    }
  }
  if (!current.empty() || (n_dofs == 0 && !out.empty()))
  {
    throw Error("read_vectors: value count is not a multiple of n_dofs");
  }
  return out;
}

void write_verify_csv(std::ostream &os, std::span<const VerifyRow> rows)
{
  os << "n,n_dofs,cluster,multiplicity,dist_a,eigenvalue_gaps,matched_bound_holds,"
        "estimator_ratio\n";
  for (const auto &r : rows)
  {
    os << r.n << ',' << r.n_dofs << ',' << r.cluster << ',' << r.multiplicity << ','
       << format_double(r.dist_a) << ',';
    for (std::size_t i = 0; i < r.eigenvalue_gaps.size(); i++)
    {
      os << (i ? ";" : "") << format_double(r.eigenvalue_gaps[i]);
    }
    os << ',' << (r.matched_bound_holds ? 1 : 0) << ',' << format_double(r.estimator_ratio)
       << '\n';
  }
}

}  // namespace paro
