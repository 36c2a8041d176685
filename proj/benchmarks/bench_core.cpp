// Copyright The paro-afem Authors
// SPDX-License-Identifier: Apache-2.0

#include <benchmark/benchmark.h>

#include <random>
#include "paro/adapt.hpp"
#include "paro/estimator.hpp"
#include "paro/minres.hpp"
#include "paro/orbital.hpp"
#include "paro/verify.hpp"

namespace
{

using namespace paro;

Mesh square(int rounds)
{
  return refine_uniform(build_initial_mesh(DomainSpec::unit_square()), rounds);
}

void BM_Assemble(benchmark::State &state)
{
  const Mesh mesh = square(static_cast<int>(state.range(0)));
  for (auto _ : state)
  {
    benchmark::DoNotOptimize(assemble(mesh, Coefficients::laplace()));
  }
  state.counters["triangles"] = static_cast<double>(mesh.num_triangles());
}
BENCHMARK(BM_Assemble)->DenseRange(8, 12, 2)->Unit(benchmark::kMillisecond);

void BM_UniformRefine(benchmark::State &state)
{
  const Mesh mesh = square(static_cast<int>(state.range(0)));
  for (auto _ : state)
  {
    benchmark::DoNotOptimize(refine_uniform(mesh, 1));
  }
  state.counters["triangles"] = static_cast<double>(mesh.num_triangles());
}
BENCHMARK(BM_UniformRefine)->DenseRange(8, 12, 2)->Unit(benchmark::kMillisecond);

// One shifted solve near the ground state, as in every ParO half step.
void BM_ShiftedMinres(benchmark::State &state)
{
  const Mesh mesh = square(static_cast<int>(state.range(0)));
  const FemSystem sys = assemble(mesh, Coefficients::laplace());
  const ReferencePairs ref = reference_eig(sys, 1);
  std::mt19937 rng(1);
  std::uniform_real_distribution<double> u(-1e-3, 1e-3);
  Vector x = ref.vectors[0];
  for (double &c : x)
  {
    c += u(rng);
  }
  const ShiftedOperator op(sys.stiffness, sys.mass, 0.95 * ref.values[0]);
  const Vector rhs = sys.mass * x;
  std::size_t iterations = 0;
  for (auto _ : state)
  {
    const MinresResult r = minres_solve(op, rhs);
    iterations = r.iterations;
    benchmark::DoNotOptimize(r.x.data());
  }
  state.counters["dofs"] = static_cast<double>(sys.n_dofs());
  state.counters["iterations"] = static_cast<double>(iterations);
}
BENCHMARK(BM_ShiftedMinres)->DenseRange(6, 10, 2)->Unit(benchmark::kMillisecond);

void BM_Estimate(benchmark::State &state)
{
  const Mesh mesh = square(static_cast<int>(state.range(0)));
  const FemSystem sys = assemble(mesh, Coefficients::laplace());
  const ReferencePairs ref = reference_eig(sys, 3);
  const ResidualBlock block = make_residual_block(sys, ref.vectors, ref.values);
  const auto threads = static_cast<std::size_t>(state.range(1));
  for (auto _ : state)
  {
    benchmark::DoNotOptimize(estimate(mesh, Coefficients::laplace(), block, threads));
  }
}
BENCHMARK(BM_Estimate)->ArgsProduct({{8, 10}, {1, 4}})->Unit(benchmark::kMillisecond);

void BM_ParoStep(benchmark::State &state)
{
  const Mesh mesh = square(8);
  const FemSystem sys = assemble(mesh, Coefficients::laplace());
  const SeedSource source = low_mode_seed(DomainSpec::unit_square(), 6, Coefficients::laplace());
  const auto seeds = source(mesh, sys, 6);
  const OrbitalBlock b0 = ritz_step(sys, seeds, 0.02);
  ParoTolerances tols;
  tols.threads = static_cast<std::size_t>(state.range(0));
  tols.max_inner = 1;
  for (auto _ : state)
  {
    benchmark::DoNotOptimize(paro_inner_loop(sys, b0, tols));
  }
}
BENCHMARK(BM_ParoStep)->Arg(1)->Arg(2)->Arg(6)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
