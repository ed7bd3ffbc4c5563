// Serial reference vs OpenMP kernels. Thread count follows FEVOLVE_THREADS.

#include <benchmark/benchmark.h>

#include <cmath>
#include <random>

#include "fevolve/evolution.hpp"
#include "fevolve/kernels.hpp"
#include "fevolve/problems.hpp"

using namespace fevolve;

namespace {

Mat tensor2(double u) {
  Mat T(2, 2);
  T << 1.0 + u * u, 0.1 * std::sin(u), 0.1 * std::sin(u), 1.0 + std::exp(-u * u);
  return T;
}

std::vector<double> random_values(std::size_t n) {
  std::mt19937 rng(1);
  std::uniform_real_distribution<double> ud(-1.0, 1.0);
  std::vector<double> v(n);
  for (auto& x : v) x = ud(rng);
  return v;
}

template <bool Parallel>
void BM_WeightedTensors(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto samples = random_values(n);
  const std::vector<double> weights(n, 1.0 / static_cast<double>(n));
  std::vector<Mat> out(n);
  for (auto _ : state) {
    if constexpr (Parallel) {
      kernels::weighted_tensors_parallel(samples, weights, tensor2, out);
    } else {
      kernels::weighted_tensors_serial(samples, weights, tensor2, out);
    }
    benchmark::DoNotOptimize(out.data());
  }
  state.SetItemsProcessed(static_cast<int64_t>(state.iterations() * n));
}

// One Picard sweep's right-hand-side evaluations on the nonlinear diffusion preset.
template <bool Parallel>
void BM_PicardNodes(benchmark::State& state) {
  const double h = 1.0 / static_cast<double>(state.range(0));
  const auto e = std::get<EvolutionPreset>(instantiate("nonlinear_diffusion_1d", h, 1.0));
  const PicardSystem sys = picard_system(e.problem);
  const std::vector<CVec> states(101, e.u0);
  std::vector<CVec> out(states.size());
  for (auto _ : state) {
    if constexpr (Parallel) {
      kernels::evaluate_nodes_parallel(sys.rhs, states, out);
    } else {
      kernels::evaluate_nodes_serial(sys.rhs, states, out);
    }
    benchmark::DoNotOptimize(out.data());
  }
}

template <bool Parallel>
void BM_StateStiffness(benchmark::State& state) {
  const double h = 1.0 / static_cast<double>(state.range(0));
  const Grid grid = unit_grid(2, h, BoundaryCondition::dirichlet);
  const Projector proj = build_projector(grid, BoundaryCondition::dirichlet);
  const GramMatrix mass = assemble_gram(proj);
  const FactoredOperator fo =
      build_difference_factor(proj, mass).with_diffusion(DiffusionModel::state_dependent(tensor2, 3.0, 3.0));
  const Vec v = Vec::Constant(static_cast<Eigen::Index>(proj.dof_count()), 0.3);
  for (auto _ : state) {
    SpMat S = assemble_stiffness(fo, &v, Parallel);
    benchmark::DoNotOptimize(S.valuePtr());
  }
}

}  // namespace

BENCHMARK(BM_WeightedTensors<false>)->Arg(1 << 14)->Arg(1 << 18);
BENCHMARK(BM_WeightedTensors<true>)->Arg(1 << 14)->Arg(1 << 18);
BENCHMARK(BM_PicardNodes<false>)->Arg(32)->Arg(128);
BENCHMARK(BM_PicardNodes<true>)->Arg(32)->Arg(128);
BENCHMARK(BM_StateStiffness<false>)->Arg(32)->Arg(64);
BENCHMARK(BM_StateStiffness<true>)->Arg(32)->Arg(64);

BENCHMARK_MAIN();
