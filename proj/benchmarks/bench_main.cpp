#include <benchmark/benchmark.h>

#include <cmath>

#include "hypres/bs.hpp"
#include "hypres/circle_model.hpp"
#include "hypres/floquet.hpp"
#include "hypres/model_quantum.hpp"
#include "hypres/oracle.hpp"
#include "hypres/orbits.hpp"
#include "hypres/systems.hpp"

using namespace hypres;

namespace {

PhasePoint hyp2_start() {
    Vec x(4);
    x << 1.0, 0.0, 0.0, 0.0;
    return PhasePoint::from_stacked(x);
}

void BM_Flow(benchmark::State& state) {
    const HamiltonianSystem s = semihyp3();
    Vec x(6);
    x << 1.0, 0.0, 0.2, 0.0, 0.0, 0.1;
    const PhasePoint x0 = PhasePoint::from_stacked(x);
    const double tol = std::pow(10.0, -static_cast<double>(state.range(0)));
    for (auto _ : state) benchmark::DoNotOptimize(flow(s, x0, 2 * M_PI, tol));
}
BENCHMARK(BM_Flow)->Arg(8)->Arg(10)->Arg(12)->Unit(benchmark::kMicrosecond);

void BM_Monodromy(benchmark::State& state) {
    const HamiltonianSystem s = semihyp3();
    Vec x(6);
    x << 1.0, 0.0, 0.0, 0.0, 0.0, 0.0;
    const PeriodicOrbit o = find_periodic_orbit(s, PhasePoint::from_stacked(x), 2 * M_PI, 1e-10, 40, 64);
    for (auto _ : state) benchmark::DoNotOptimize(monodromy_matrix(s, o, 1e-11));
}
BENCHMARK(BM_Monodromy)->Unit(benchmark::kMillisecond);

void BM_FindOrbit(benchmark::State& state) {
    const HamiltonianSystem s = hyp2();
    Vec x(4);
    x << 1.1, 0.05, 0.0, 0.0;
    const PhasePoint guess = PhasePoint::from_stacked(x);
    for (auto _ : state) benchmark::DoNotOptimize(find_periodic_orbit(s, guess, 6.3, 1e-10, 40));
}
BENCHMARK(BM_FindOrbit)->Unit(benchmark::kMillisecond);

void BM_SolveBsModel(benchmark::State& state) {
    const double h = 1.0 / static_cast<double>(state.range(0));
    const ModelSpec spec = ModelSpec::hyperbolic(1.0, h);
    const SemiclassicalAction a = model_action(spec);
    const SpectralWindow w = SpectralWindow::standard(0.0, 0.1, h);
    BsOptions opt;
    opt.threads = 1;
    for (auto _ : state) benchmark::DoNotOptimize(solve_bs(a, w, {}, opt));
}
BENCHMARK(BM_SolveBsModel)->Arg(100)->Arg(400)->Unit(benchmark::kMillisecond);

void BM_SolveBsHyp2(benchmark::State& state) {
    const HamiltonianSystem s = hyp2();
    const PeriodicOrbit seed = find_periodic_orbit(s, hyp2_start(), 2 * M_PI, 1e-11, 40);
    const OrbitFamily fam = continue_family(s, seed, 0.3, 0.7, 9);
    std::vector<FloquetData> floq;
    for (const auto& o : fam.orbits) floq.push_back(floquet_analysis(s, o));
    const SemiclassicalAction a = assemble_action(fam, floq, s, 0, 0.02);
    const SpectralWindow w{0.5, 0.1, 0.1, 1.0};
    BsOptions opt;
    opt.threads = 1;
    for (auto _ : state) benchmark::DoNotOptimize(solve_bs(a, w, {}, opt));
}
BENCHMARK(BM_SolveBsHyp2)->Unit(benchmark::kMillisecond);

void BM_GramDeterminant(benchmark::State& state) {
    const CircleGrid g(static_cast<int>(state.range(0)), 0.1);
    const Cutoff chi = Cutoff::smooth_step(g);
    for (auto _ : state) benchmark::DoNotOptimize(gram_determinant(g, cplx(0.037, -0.02), chi));
}
BENCHMARK(BM_GramDeterminant)->Arg(256)->Arg(1024)->Arg(4096);

void BM_Zgeev(benchmark::State& state) {
    GridSpec1D g{4.0, static_cast<int>(state.range(0)), M_PI / 4, 0.05};
    const CMat op = scaled_inverted_oscillator(g);
    for (auto _ : state) benchmark::DoNotOptimize(all_eigenvalues(op));
}
BENCHMARK(BM_Zgeev)->Arg(256)->Arg(512)->Arg(1024)->Unit(benchmark::kMillisecond);

void BM_DeterminantNewton(benchmark::State& state) {
    const ModelSpec spec = ModelSpec::hyperbolic(1.0, 0.01);
    const cplx guess = cplx(0.03, -0.025) + 0.01 * cplx(0.07, 0.05);
    for (auto _ : state) benchmark::DoNotOptimize(locate_determinant_zero(spec, guess, 6, 1e-14));
}
BENCHMARK(BM_DeterminantNewton)->Unit(benchmark::kMicrosecond);

}  // namespace

BENCHMARK_MAIN();
