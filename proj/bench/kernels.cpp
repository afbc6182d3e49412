// Parallel kernels against their serial references.

#include <benchmark/benchmark.h>

#include "brownscope/hj_additive.hpp"
#include "brownscope/hj_multiplicative.hpp"
#include "brownscope/region.hpp"
#include "brownscope/rmt_oracle.hpp"

using namespace brownscope;

namespace {

const SpectralMeasure& three_atoms() {
    static const auto mu =
        SpectralMeasure::atomic(SupportKind::RealLine, {{-1.0, 0.3}, {0.2, 0.4}, {1.5, 0.3}});
    return mu;
}

const SpectralMeasure& circle_density() {
    static const auto mu = SpectralMeasure::density_on_circle([](double th) { return 1.0 + 0.5 * std::cos(th); });
    return mu;
}

template <Grid (*Eval)(const ScalarField&, const Bounds&, std::size_t, std::size_t)>
void lifetime_grid_additive(benchmark::State& state) {
    const auto n = static_cast<std::size_t>(state.range(0));
    const ScalarField f = [](Complex z) { return T_additive(three_atoms(), z); };
    for (auto _ : state) benchmark::DoNotOptimize(Eval(f, {-3.0, 3.0, -3.0, 3.0}, n, n));
    state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations() * n * n));
}

template <Grid (*Eval)(const ScalarField&, const Bounds&, std::size_t, std::size_t)>
void lifetime_grid_unitary_density(benchmark::State& state) {
    const auto n = static_cast<std::size_t>(state.range(0));
    const ScalarField f = [](Complex z) { return T_mult_unitary(circle_density(), z); };
    for (auto _ : state) benchmark::DoNotOptimize(Eval(f, {-2.0, 2.0, -2.0, 2.0}, n, n));
    state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations() * n * n));
}

using TrialRunner = std::vector<std::vector<double>> (*)(std::size_t, const std::function<std::vector<double>(std::size_t)>&);

template <TrialRunner Run>
void ginibre_trials(benchmark::State& state) {
    const auto n = static_cast<std::size_t>(state.range(0));
    const std::size_t trials = 8;
    auto trial = [n](std::size_t i) {
        auto rng = make_engine(42, i);
        const Matrix a = sample_ginibre(n, 1.0, rng);
        return std::vector<double>{empirical_dSde(a, 2.0, 0.1)};
    };
    for (auto _ : state) benchmark::DoNotOptimize(Run(trials, trial));
}

}  // namespace

BENCHMARK(lifetime_grid_additive<evaluate_grid>)->Name("grid/additive/parallel")->Arg(128)->Arg(512);
BENCHMARK(lifetime_grid_additive<evaluate_grid_serial>)->Name("grid/additive/serial")->Arg(128)->Arg(512);
BENCHMARK(lifetime_grid_unitary_density<evaluate_grid>)->Name("grid/unitary_density/parallel")->Arg(64)->Arg(128);
BENCHMARK(lifetime_grid_unitary_density<evaluate_grid_serial>)->Name("grid/unitary_density/serial")->Arg(64)->Arg(128);
BENCHMARK(ginibre_trials<run_trials>)->Name("trials/ginibre/parallel")->Arg(100)->Arg(200)->Unit(benchmark::kMillisecond);
BENCHMARK(ginibre_trials<run_trials_serial>)->Name("trials/ginibre/serial")->Arg(100)->Arg(200)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
