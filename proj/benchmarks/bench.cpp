#include <benchmark/benchmark.h>

#include <cmath>

#include "fracstar/direct.hpp"
#include "fracstar/spatial.hpp"

namespace {

using namespace fracstar;

StarGraph make_graph(std::size_t intervals) {
  return StarGraph({UniformGrid(1.0, intervals), UniformGrid(0.8, intervals),
                    UniformGrid(1.2, intervals)});
}

Coefficients make_coeff(const StarGraph& graph) {
  GraphSeries gamma = GraphSeries::zeros(graph);
  for (std::size_t k = 0; k < graph.edge_count(); ++k) {
    const UniformGrid& grid = graph.edge(k);
    for (std::size_t i = 0; i < grid.node_count(); ++i) {
      gamma.edge(k)[i] =
          1.0 + 0.25 * std::sin(3.0 * grid.node(i) + static_cast<double>(k));
    }
  }
  return Coefficients(std::move(gamma), 0.7, 1.3);
}

void BM_FracIntegral(benchmark::State& state) {
  const UniformGrid grid(1.0, static_cast<std::size_t>(state.range(0)));
  Series f = Series::zeros(grid);
  for (std::size_t i = 0; i < f.size(); ++i) {
    f[i] = std::cos(2.0 * grid.node(i));
  }
  const FracOrder beta(0.75);
  for (auto _ : state) {
    benchmark::DoNotOptimize(frac_integral(f, beta, Side::Left));
  }
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_FracIntegral)->RangeMultiplier(2)->Range(64, 1024)->Complexity();

void BM_AssembleStepping(benchmark::State& state) {
  const StarGraph graph = make_graph(static_cast<std::size_t>(state.range(0)));
  const Coefficients coeff = make_coeff(graph);
  const FracOrder beta(0.75);
  for (auto _ : state) {
    benchmark::DoNotOptimize(assemble_stepping(12.5, coeff, beta));
  }
}
BENCHMARK(BM_AssembleStepping)->RangeMultiplier(2)->Range(32, 128);

void BM_SteppingSolve(benchmark::State& state) {
  const StarGraph graph = make_graph(static_cast<std::size_t>(state.range(0)));
  const Coefficients coeff = make_coeff(graph);
  const SteppingOperator op = assemble_stepping(12.5, coeff, FracOrder(0.75));
  GraphSeries rhs = GraphSeries::zeros(graph);
  for (std::size_t k = 0; k < graph.edge_count(); ++k) {
    const UniformGrid& grid = graph.edge(k);
    for (std::size_t i = 0; i < grid.node_count(); ++i) {
      rhs.edge(k)[i] = std::sin(grid.node(i) + static_cast<double>(k));
    }
  }
  for (auto _ : state) {
    benchmark::DoNotOptimize(stepping_solve(op, rhs));
  }
}
BENCHMARK(BM_SteppingSolve)->RangeMultiplier(2)->Range(32, 128);

void BM_SolveDirect(benchmark::State& state) {
  const std::size_t n = static_cast<std::size_t>(state.range(0));
  const StarGraph graph = make_graph(n);
  const DirectProblem problem(
      make_coeff(graph), FracOrder(0.5), FracOrder(0.75), TimeGrid(1.0, 16),
      [](std::size_t k, double x, double t) {
        return std::sin(x + static_cast<double>(k)) * t * t;
      });
  for (auto _ : state) {
    benchmark::DoNotOptimize(solve_direct(problem));
  }
}
BENCHMARK(BM_SolveDirect)->Arg(16)->Arg(32);

}  // namespace

BENCHMARK_MAIN();
