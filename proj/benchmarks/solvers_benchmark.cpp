#include <benchmark/benchmark.h>

#include "penbsde/constrained.hpp"
#include "penbsde/control.hpp"
#include "penbsde/harness/instances.hpp"
#include "penbsde/penalized.hpp"
#include "penbsde/stopping.hpp"
#include "penbsde/switching.hpp"

using namespace penbsde;
using namespace penbsde::harness;

namespace {

ProblemSpec benchProblem() {
    RandomStream stream(17);
    return randomProblem(stream, true, 2.0);
}

Lattice benchLattice(benchmark::State& state) {
    return Lattice(TimeGrid(0.0, 1.0, static_cast<std::size_t>(state.range(0))));
}

}  // namespace

static void BM_Penalized(benchmark::State& state) {
    const Lattice lattice = benchLattice(state);
    const ProblemSpec spec = benchProblem();
    for (auto _ : state) benchmark::DoNotOptimize(solvePenalized(lattice, spec, {false}).root());
    state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_Penalized)->RangeMultiplier(4)->Range(64, 4096)->Complexity(benchmark::oNSquared);

static void BM_StoppingDP(benchmark::State& state) {
    const Lattice lattice = benchLattice(state);
    const ProblemSpec spec = benchProblem();
    const ArrivalOverlay overlay(lattice.grid(), 2.0);
    for (auto _ : state) benchmark::DoNotOptimize(poissonStoppingDP(lattice, overlay, spec, nullptr, {false}).root());
    state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_StoppingDP)->RangeMultiplier(4)->Range(64, 4096)->Complexity(benchmark::oNSquared);

static void BM_OptimalControl(benchmark::State& state) {
    const Lattice lattice = benchLattice(state);
    const ProblemSpec spec = benchProblem();
    for (auto _ : state) benchmark::DoNotOptimize(optimalControlValue(lattice, spec, {false}).field.root());
}
BENCHMARK(BM_OptimalControl)->RangeMultiplier(4)->Range(64, 4096);

static void BM_SwitchingDP(benchmark::State& state) {
    const Lattice lattice = benchLattice(state);
    RandomStream stream(23);
    const RandomSwitchingInstance in = randomSwitching(stream, 3, true);
    const ArrivalOverlay overlay(lattice.grid(), 2.0);
    for (auto _ : state) benchmark::DoNotOptimize(poissonSwitchingDP(lattice, overlay, in.regimes, in.costs).root(0));
}
BENCHMARK(BM_SwitchingDP)->RangeMultiplier(4)->Range(64, 1024);

static void BM_ConstrainedDP(benchmark::State& state) {
    const Lattice lattice = benchLattice(state);
    const ProblemSpec spec = benchProblem();
    const ArrivalOverlay overlay(lattice.grid(), 2.0);
    const ConstraintSet set = ConstraintSet::interval(-0.5, 0.5);
    for (auto _ : state)
        benchmark::DoNotOptimize(constrainedRepresentationDP(lattice, overlay, spec, set, 1.0).field.root());
}
BENCHMARK(BM_ConstrainedDP)->RangeMultiplier(4)->Range(64, 1024);

static void BM_StoppingMonteCarlo(benchmark::State& state) {
    const Lattice lattice(TimeGrid(0.0, 1.0, 100));
    const ProblemSpec spec = benchProblem();
    const ArrivalOverlay overlay(lattice.grid(), 2.0);
    const AugmentedValueField field = poissonStoppingDP(lattice, overlay, spec);
    const StoppingRule rule = extractOptimalRule(field, lattice, spec);
    RandomStream stream(5);
    const auto paths = static_cast<std::size_t>(state.range(0));
    for (auto _ : state)
        benchmark::DoNotOptimize(simulateStoppingRule(lattice, overlay, spec, rule, paths, stream).mean);
    state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_StoppingMonteCarlo)->Arg(10000)->Arg(100000);

BENCHMARK_MAIN();
