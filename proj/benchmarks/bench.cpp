// Micro-benchmarks for the kernels that dominate scan and fit runtimes.
#include <benchmark/benchmark.h>

#include <vector>

#include "gsdscope/beam.hpp"
#include "gsdscope/dynamics.hpp"
#include "gsdscope/fit.hpp"
#include "gsdscope/imaging.hpp"
#include "gsdscope/wavepacket.hpp"

using namespace gsdscope;

namespace {

void BM_Lg01Intensity(benchmark::State& state) {
    const BeamSpec beam(BeamShape::Vortex, 1.2e-3, 4.2e-6);
    double r = 0.0;
    for (auto _ : state) {
        benchmark::DoNotOptimize(lg01_intensity(r, beam));
        r += 3.7e-9;
        if (r > 4e-6) r = 0.0;
    }
}
BENCHMARK(BM_Lg01Intensity);

void BM_ThermalExcitation(benchmark::State& state) {
    const TrapSpec trap = TrapSpec::defaults();
    const DephasingBeta beta = dephasing_beta(
        trap, ThermalState::defaults(),
        k_projections(FrameSet::defaults(), TransitionSpec::defaults().wavenumber()));
    double omega = 1e5;
    for (auto _ : state) {
        benchmark::DoNotOptimize(thermal_excitation(omega, 19e-6, beta));
        omega += 331.0;
        if (omega > 2e6) omega = 1e5;
    }
}
BENCHMARK(BM_ThermalExcitation);

void BM_ConvolveGrid(benchmark::State& state) {
    const BeamSpec beam(BeamShape::Vortex, 1.2e-3, 4.2e-6);
    const TrapSpec trap = TrapSpec::defaults();
    const ThermalState st = ThermalState::defaults();
    const WavePacket wp = thermal_wavepacket(trap, st);
    const GridSpec grid{static_cast<int>(state.range(0)), 1e-6};
    for (auto _ : state)
        benchmark::DoNotOptimize(convolve_grid(beam, PulseSpec::defaults(), trap, st, wp,
                                               grid, FrameSet::defaults()));
}
BENCHMARK(BM_ConvolveGrid)->Arg(96)->Arg(128)->Unit(benchmark::kMillisecond);

void BM_McConvolve(benchmark::State& state) {
    const BeamSpec beam(BeamShape::Vortex, 1.2e-3, 4.2e-6);
    const TrapSpec trap = TrapSpec::defaults();
    const ThermalState st = ThermalState::defaults();
    const WavePacket wp = thermal_wavepacket(trap, st);
    std::uint64_t seed = 1;
    for (auto _ : state)
        benchmark::DoNotOptimize(mc_convolve(beam, PulseSpec::defaults(), trap, st, wp,
                                             FrameSet::defaults(), 20000, seed++));
}
BENCHMARK(BM_McConvolve)->Unit(benchmark::kMillisecond);

void BM_EpsfProfileThermal(benchmark::State& state) {
    const BeamSpec beam(BeamShape::Vortex, 1.2e-3, 4.2e-6);
    for (auto _ : state)
        benchmark::DoNotOptimize(epsf_profile(beam, PulseSpec::defaults(),
                                              TrapSpec::defaults(), ThermalState::defaults(),
                                              EpsfMode::ThermalClosedForm));
}
BENCHMARK(BM_EpsfProfileThermal)->Unit(benchmark::kMicrosecond);

void BM_FitLorentzian(benchmark::State& state) {
    std::vector<double> x, y;
    for (int i = 0; i < 21; ++i) {
        x.push_back(-1.5e6 + i * 1.5e5);
        y.push_back(lorentzian(x.back(), 0.6, 1.2e5, 3.1e5, 0.04));
    }
    for (auto _ : state) benchmark::DoNotOptimize(fit_lorentzian(x, y));
}
BENCHMARK(BM_FitLorentzian)->Unit(benchmark::kMicrosecond);

} // namespace

BENCHMARK_MAIN();
