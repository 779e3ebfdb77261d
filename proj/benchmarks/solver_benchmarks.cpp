#include <benchmark/benchmark.h>

#include "gradreg/dataset.hpp"
#include "gradreg/instances.hpp"
#include "gradreg/methods.hpp"
#include "gradreg/subsolver.hpp"

namespace {

using namespace gradreg;

CompositeProblem logistic_problem(Index n) {
  return make_logistic(synthetic_classification(5 * n, n, 7), 1e-3);
}

// One regularized Newton step at the origin; the argument is the dimension.
void BM_StepDirect(benchmark::State& state) {
  const auto p = logistic_problem(state.range(0));
  const PrimalVector x = PrimalVector::zero(p.dim());
  const double g = p.norms.dual(p.smooth.gradient(x));
  const double A = regularization_parameter(g, optimal_H(p.lips_hessian(), 1.0), 1.0);
  for (auto _ : state) benchmark::DoNotOptimize(solve_step_smooth(p, x, A));
}

void BM_StepCg(benchmark::State& state) {
  const auto p = logistic_problem(state.range(0));
  const PrimalVector x = PrimalVector::zero(p.dim());
  const double g = p.norms.dual(p.smooth.gradient(x));
  const double A = regularization_parameter(g, optimal_H(p.lips_hessian(), 1.0), 1.0);
  InnerSolverConfig cg;
  cg.linear = LinearSolveMode::cg;
  cg.cg_tolerance = 1e-10;
  for (auto _ : state) benchmark::DoNotOptimize(solve_step_smooth(p, x, A, cg));
}

void BM_RunToTolerance(benchmark::State& state) {
  const auto p = logistic_problem(100);
  SolverConfig c;
  c.mode = static_cast<Mode>(state.range(0));
  c.H = optimal_H(p.lips_hessian(), 1.0);
  c.H0 = p.lips_hessian() / 8.0;
  c.grad_tolerance = 1e-8;
  c.certify = false;
  if (c.mode == Mode::accelerated) {
    // The accelerated scheme stops on the objective gap.
    CompositeProblem q = p;
    q.reference = reference_solve(p, PrimalVector::zero(p.dim()));
    c.f_gap_tolerance = 1e-6;
    for (auto _ : state) benchmark::DoNotOptimize(run(q, PrimalVector::zero(q.dim()), c));
    state.SetLabel(to_string(c.mode));
    return;
  }
  for (auto _ : state) benchmark::DoNotOptimize(run(p, PrimalVector::zero(p.dim()), c));
  state.SetLabel(to_string(c.mode));
}

BENCHMARK(BM_StepDirect)->Arg(50)->Arg(200)->Arg(500)->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_StepCg)->Arg(50)->Arg(200)->Arg(500)->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_RunToTolerance)->DenseRange(0, 2)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
