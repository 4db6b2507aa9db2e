#include "ellcert/constants.hpp"
#include "ellcert/operator.hpp"
#include "ellcert/solver.hpp"
#include "ellcert/transform.hpp"

#include <benchmark/benchmark.h>

using namespace ellcert;

namespace {

ProblemSpec drift_problem() {
  ProblemSpec spec = ProblemSpec::laplacian(Box::unit(2));
  spec.matrix_a = {Expr::parse("1 + x1"), Expr(), Expr(), Expr::number(1)};
  spec.m_bound = 2;
  spec.drift_h = {Expr::parse("-5*(x2 - 0.5)"), Expr::parse("5*(x1 - 0.5)")};
  return manufacture(spec, Expr::parse("sin(pi*x1)*sin(pi*x2)"));
}

void BM_assemble(benchmark::State& state) {
  const ProblemSpec spec = drift_problem();
  const Grid grid = Grid::uniform(spec.domain, static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(assemble(spec, grid));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(grid.size()));
}
BENCHMARK(BM_assemble)->Arg(65)->Arg(129)->Arg(257)->Unit(benchmark::kMillisecond);

void BM_solve(benchmark::State& state) {
  const ProblemSpec spec = drift_problem();
  const Grid grid = Grid::uniform(spec.domain, static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(solve_bvp(spec, grid));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(grid.size()));
}
BENCHMARK(BM_solve)->Arg(65)->Arg(129)->Arg(257)->Unit(benchmark::kMillisecond);

void BM_transform(benchmark::State& state) {
  const ProblemSpec spec = drift_problem();
  const Grid grid = Grid::uniform(spec.domain, static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(build_weight(spec, grid));
}
BENCHMARK(BM_transform)->Arg(65)->Arg(129)->Unit(benchmark::kMillisecond);

void BM_optimize_d_hat(benchmark::State& state) {
  const ConstantInputs in{2, 1.0, 1.0, 0.5, 1.0, 3.0, 4.0};
  for (auto _ : state) benchmark::DoNotOptimize(optimize_d_hat(in));
}
BENCHMARK(BM_optimize_d_hat);

}  // namespace
BENCHMARK_MAIN();
