#include <benchmark/benchmark.h>

#include "trimsvm/kernel.hpp"
#include "trimsvm/qp.hpp"
#include "trimsvm/robustness_lab.hpp"
#include "trimsvm/trainer.hpp"

using namespace trimsvm;

namespace {

void BM_gram(benchmark::State& state) {
    const Eigen::Index m = state.range(0);
    Dataset d = spiral(m, 0.05, 1);
    const KernelSpec k = KernelSpec::gaussian(2.0);
    for (auto _ : state) {
        GramMatrix g = gram(k, d.features);
        benchmark::DoNotOptimize(g.entries.data());
    }
    state.SetComplexityN(m);
}
BENCHMARK(BM_gram)->Arg(100)->Arg(200)->Arg(400)->Complexity();

void BM_qp_solve(benchmark::State& state) {
    const Eigen::Index m = state.range(0);
    Dataset d = spiral(m, 0.05, 2);
    GramMatrix g = gram(KernelSpec::gaussian(2.0), d.features);
    Vector y(m);
    for (Eigen::Index i = 0; i < m; ++i) y(i) = d.labels[static_cast<std::size_t>(i)];
    qp::QpProblem p =
        build_subproblem(g.entries, y, std::vector<int>(static_cast<std::size_t>(m), 1), 0.4);
    for (auto _ : state) {
        qp::QpSolution sol = qp::solve(p, 1e-10);
        benchmark::DoNotOptimize(sol.objective);
    }
    state.SetComplexityN(m);
}
BENCHMARK(BM_qp_solve)->Arg(100)->Arg(200)->Arg(400)->Complexity();

void BM_train(benchmark::State& state) {
    const Eigen::Index m = state.range(0);
    Dataset d = spiral(m, 0.05, 3);
    GramMatrix g = gram(KernelSpec::gaussian(2.0), d.features);
    TrainConfig cfg;
    cfg.nu = 0.4;
    cfg.mu = 0.1;
    cfg.kernel = g.kernel;
    for (auto _ : state) {
        Model model = train_with_gram(d, g, cfg);
        benchmark::DoNotOptimize(model.objective);
    }
    state.SetComplexityN(m);
}
BENCHMARK(BM_train)->Arg(100)->Arg(200)->Complexity();

void BM_median_heuristic(benchmark::State& state) {
    Dataset d = spiral(state.range(0), 0.05, 4);
    for (auto _ : state) benchmark::DoNotOptimize(median_heuristic_gamma(d.features, 0));
}
BENCHMARK(BM_median_heuristic)->Arg(200)->Arg(1000);

}  // namespace

BENCHMARK_MAIN();
