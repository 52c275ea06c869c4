// Microbenchmarks for the hot paths: special-function evaluation, the
// blow-up ODE solve, the explosion-time quadrature, and MC throughput.

#include <benchmark/benchmark.h>

#include "qghjm/detsys.hpp"
#include "qghjm/explosion.hpp"
#include "qghjm/mc.hpp"
#include "qghjm/weierstrass.hpp"

using namespace qghjm;

namespace {

ModelParams headline() {
    return ModelParams(0.2, 0.0, ForwardCurve::flat(0.05));
}

void BM_WpEval(benchmark::State& state) {
    const double omega2 = WpConstants::get().omega2;
    double z = 0.3 * omega2;
    for (auto _ : state) {
        benchmark::DoNotOptimize(wp_equianharmonic(z));
        z += 1e-9;   // defeat value caching without leaving the cell
    }
}
BENCHMARK(BM_WpEval);

void BM_HeadlineBlowupSolve(benchmark::State& state) {
    const ModelParams p = headline();
    for (auto _ : state) {
        Trajectory traj = solve(p, 70.0);
        benchmark::DoNotOptimize(traj.blown_up);
    }
}
BENCHMARK(BM_HeadlineBlowupSolve)->Unit(benchmark::kMillisecond);

void BM_TauQuadrature(benchmark::State& state) {
    for (auto _ : state) {
        benchmark::DoNotOptimize(explosion_time_quadrature(0.2, 0.04, 0.05).tau);
    }
}
BENCHMARK(BM_TauQuadrature)->Unit(benchmark::kMillisecond);

void BM_McPaths(benchmark::State& state) {
    const ModelParams p = headline();
    mc::Config cfg;
    cfg.n_paths = static_cast<int>(state.range(0));
    cfg.dt = 1.0 / 250.0;
    cfg.noise_scale = 0.05;
    cfg.seed = 1;
    const double t_end = 5.0;
    for (auto _ : state) {
        auto s = mc::simulate(p, t_end, cfg);
        benchmark::DoNotOptimize(s.mean_r.back());
    }
    const auto steps = static_cast<std::int64_t>(t_end / cfg.dt);
    state.SetItemsProcessed(state.iterations() * state.range(0) * steps);
}
BENCHMARK(BM_McPaths)->Arg(64)->Arg(1024)->Unit(benchmark::kMillisecond);

} // namespace

BENCHMARK_MAIN();
