#include <benchmark/benchmark.h>

#include <cmath>
#include <vector>

#include "degpar/carleman.hpp"
#include "degpar/evolution.hpp"
#include "degpar/weights.hpp"

namespace {

using namespace degpar;

DegeneracyModel bench_model(Form form) {
  return DegeneracyModel::power_law(0.5, 0.5, form);
}

void bm_assemble_operator(benchmark::State& state) {
  const auto model = bench_model(Form::divergence);
  const auto grid = build_grid(int(state.range(0)), model);
  for (auto _ : state) {
    auto op = assemble_operator(model, grid);
    benchmark::DoNotOptimize(op.diag.data());
  }
}
BENCHMARK(bm_assemble_operator)->Arg(201)->Arg(401);

void bm_implicit_step(benchmark::State& state) {
  const auto model = bench_model(Form::divergence);
  const auto p = EvolutionProblem::make(model, int(state.range(0)), 400, 1.0);
  std::vector<double> u(p.grid.n()), out(p.grid.n());
  for (int i = 0; i < p.grid.n(); ++i)
    u[i] = std::cos(M_PI * p.grid.nodes[i]);
  for (auto _ : state) {
    implicit_step(p.op, p.dt(), u, out);
    benchmark::DoNotOptimize(out.data());
  }
}
BENCHMARK(bm_implicit_step)->Arg(201)->Arg(401);

void bm_carleman_lhs(benchmark::State& state) {
  const auto model = bench_model(Form::divergence);
  const auto p = EvolutionProblem::make(model, int(state.range(0)), 100, 1.0);
  std::vector<double> vT(p.grid.n());
  for (int i = 0; i < p.grid.n(); ++i)
    vT[i] = std::cos(M_PI * p.grid.nodes[i]);
  const auto traj = solve_adjoint(p, vT);
  const auto w = DivergenceWeights::with_defaults(model);
  const double s = 100.0;
  const double shift = carleman_log_shift(w, p.grid, s, p.T);
  for (auto _ : state) {
    benchmark::DoNotOptimize(lhs_div(traj, p.grid, w, s, p.T, shift));
  }
}
BENCHMARK(bm_carleman_lhs)->Arg(101)->Arg(201);

void bm_psi_eval(benchmark::State& state) {
  const auto w = DivergenceWeights::with_defaults(bench_model(Form::divergence));
  double x = 0.0;
  for (auto _ : state) {
    x += 1e-4;
    if (x >= 1.0) x = 0.0;
    benchmark::DoNotOptimize(w.psi(x));
  }
}
BENCHMARK(bm_psi_eval);

}  // namespace

BENCHMARK_MAIN();
