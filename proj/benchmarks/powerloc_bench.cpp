#include <powerloc/fixtures.hpp>
#include <powerloc/hmm.hpp>
#include <powerloc/particle_filter.hpp>
#include <powerloc/rng.hpp>
#include <powerloc/similarity.hpp>
#include <powerloc/synthworld.hpp>

#include <benchmark/benchmark.h>

using namespace powerloc;

namespace {

std::vector<double> noise(std::size_t n, std::uint64_t seed) {
    Rng rng(seed);
    std::vector<double> v(n);
    for (auto& x : v) {
        x = standard_normal(rng);
    }
    return v;
}

void BM_Dtw(benchmark::State& state) {
    const auto n = static_cast<std::size_t>(state.range(0));
    const auto a = noise(n, 1);
    const auto b = noise(n, 2);
    for (auto _ : state) {
        benchmark::DoNotOptimize(dtw_summary(a, b));
    }
    state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_Dtw)->RangeMultiplier(2)->Range(64, 1024)->Complexity(benchmark::oNSquared);

void BM_SubsequenceDtw(benchmark::State& state) {
    const auto q = noise(static_cast<std::size_t>(state.range(0)), 3);
    const auto t = noise(2000, 4);
    for (auto _ : state) {
        benchmark::DoNotOptimize(subsequence_dtw_summary(q, t));
    }
}
BENCHMARK(BM_SubsequenceDtw)->Arg(50)->Arg(200);

void BM_Osb(benchmark::State& state) {
    const auto n = static_cast<std::size_t>(state.range(0));
    const auto a = noise(n, 5);
    const auto b = noise(n, 6);
    const double jump = default_jump_cost(a, b);
    for (auto _ : state) {
        benchmark::DoNotOptimize(osb_summary(a, b, jump, OsbMode::subsequence));
    }
    state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_Osb)->RangeMultiplier(2)->Range(32, 256)->Complexity();

void BM_SimulateDrive(benchmark::State& state) {
    const auto world = fixtures::make_world(fixtures::grid13(), 1);
    const auto plan = make_drive_plan(world, fixtures::corridor_route(), 2);
    for (auto _ : state) {
        benchmark::DoNotOptimize(simulate_drive(world, plan));
    }
}
BENCHMARK(BM_SimulateDrive)->Unit(benchmark::kMillisecond);

struct PfFixture {
    World world = fixtures::make_world(fixtures::tiny4(), 3);
    HmmModel model;
    PreparedObservation observation;

    PfFixture() {
        LibrarySpec spec;
        spec.segment_repetitions = 3;
        const auto library = build_reference_library(world, spec);
        model = build_model(world.graph(), library, fixtures::kTiny4Start, InferenceConfig{});
        const auto drive = simulate_drive(
            world, make_drive_plan(world, Route::parse("1-2-4-3"), 4));
        observation = prepare_observation(drive.trace, model.config);
    }
};

// Times the third round (a mixed population) with a cold weight cache.
void BM_ParticleFilterStep(benchmark::State& state) {
    static const PfFixture fx;
    const auto n = static_cast<std::size_t>(state.range(0));
    RouteHypothesis seed;
    seed.timed_route.route.nodes = {fx.model.start};
    std::vector<RouteHypothesis> particles(n, seed);
    for (std::size_t it = 0; it < 2; ++it) {
        particles = pf_iterate(std::move(particles), fx.observation, fx.model, 7, it).particles;
    }
    for (auto _ : state) {
        WeightCache cache;
        benchmark::DoNotOptimize(pf_iterate(particles, fx.observation, fx.model, 7, 2, 1, &cache));
    }
    state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations()) * state.range(0));
}
BENCHMARK(BM_ParticleFilterStep)->Arg(500)->Arg(2000)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
