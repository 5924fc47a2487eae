#include "epictrl/runner.hpp"
#include "epictrl/scenario.hpp"
#include "epictrl/stability.hpp"

#include <benchmark/benchmark.h>

using namespace epictrl;

namespace {

EpidemicModel reference_model()
{
    const auto built = build_scenario(presets::reference());
    return built.model;
}

void BM_Derivative(benchmark::State& state)
{
    const auto model = reference_model();
    auto y = model.initial_state(6e6);
    model.seed_strain(y, 0, 1e4);
    model.seed_strain(y, 1, 1e3);
    VaccinationRates vax;
    vax.first.assign(model.classes(), 100.0);
    vax.second.assign(model.classes() * kBands, 10.0);
    EpidemicState dy(model.classes());
    for (auto _ : state) {
        model.derivative(y, 3.0, vax, dy);
        benchmark::DoNotOptimize(dy.raw().data());
    }
    state.SetItemsProcessed(state.iterations() * static_cast<long>(model.classes()));
}
BENCHMARK(BM_Derivative);

void BM_Step(benchmark::State& state)
{
    const auto built = build_scenario(presets::reference());
    Simulation sim(built.model, built.initial, built.policy, built.vaccination, built.seeds, built.options);
    for (auto _ : state) {
        benchmark::DoNotOptimize(sim.step());
    }
}
BENCHMARK(BM_Step);

// One year of the reference scenario, vaccination starting on the last day.
void BM_OneYear(benchmark::State& state)
{
    auto cfg = presets::reference();
    cfg.run.horizon_days = 365.0;
    cfg.strains.resize(1);
    cfg.vax.start_day = 364.0;
    const auto built = build_scenario(cfg);
    for (auto _ : state) {
        auto out = run_built(built, 2.0, 1.0, "bench");
        benchmark::DoNotOptimize(out.summary.deaths);
    }
}
BENCHMARK(BM_OneYear)->Unit(benchmark::kMillisecond);

void BM_DominantRootShifted(benchmark::State& state)
{
    const CharacteristicProblem p{0.125, ShiftedExponentialKernel{6.0, 0.25}};
    for (auto _ : state) {
        benchmark::DoNotOptimize(dominant_root(p));
    }
}
BENCHMARK(BM_DominantRootShifted)->Unit(benchmark::kMicrosecond);

} // namespace
BENCHMARK_MAIN();
