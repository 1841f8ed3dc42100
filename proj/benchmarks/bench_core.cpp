#include <benchmark/benchmark.h>

#include "coordsketch/combine.hpp"
#include "coordsketch/dataset.hpp"
#include "coordsketch/estimate_ml.hpp"
#include "coordsketch/estimate_rc.hpp"
#include "coordsketch/poisson.hpp"
#include "coordsketch/sketch.hpp"

using namespace coordsketch;

namespace {

const WeightedSetCollection& shared_core_collection() {
    static const WeightedSetCollection coll =
        gen_dataset(parse_dataset_spec("shared_core(3,1000,5000)"));
    return coll;
}

std::vector<BottomKSketch> sketches_of(const WeightedSetCollection& coll, RankFamily family,
                                       std::uint64_t seed, int k) {
    std::vector<BottomKSketch> out;
    for (auto& [id, sketch] : build_coordinated(coll, family, seed, k)) {
        out.push_back(std::move(sketch));
    }
    return out;
}

}  // namespace

static void BM_BuildCoordinated(benchmark::State& state) {
    const auto& coll = shared_core_collection();
    const int k = static_cast<int>(state.range(0));
    std::uint64_t seed = 0;
    for (auto _ : state) {
        benchmark::DoNotOptimize(build_coordinated(coll, RankFamily::pri, seed++, k));
    }
    state.SetItemsProcessed(state.iterations() * coll.ground_size());
}
BENCHMARK(BM_BuildCoordinated)->Arg(64)->Arg(256);

static void BM_CombineLcs(benchmark::State& state) {
    const auto sketches = sketches_of(shared_core_collection(), RankFamily::pri, 1, 256);
    for (auto _ : state) {
        benchmark::DoNotOptimize(lcs(sketches));
    }
}
BENCHMARK(BM_CombineLcs);

static void BM_RcWeightsScs(benchmark::State& state) {
    const auto sketches = sketches_of(shared_core_collection(), RankFamily::pri, 1, 256);
    const auto combo = scs(sketches);
    for (auto _ : state) {
        benchmark::DoNotOptimize(rc_adjusted_weights(combo));
    }
}
BENCHMARK(BM_RcWeightsScs);

static void BM_EstimatePredicate(benchmark::State& state) {
    const auto& coll = shared_core_collection();
    const auto sketches = build_coordinated(coll, RankFamily::pri, 1, 256);
    const auto pred = Predicate::parse("in(A1) | in(A2) | in(A3)");
    for (auto _ : state) {
        benchmark::DoNotOptimize(estimate_weight(sketches, pred));
    }
}
BENCHMARK(BM_EstimatePredicate);

static void BM_MlUnionSolve(benchmark::State& state) {
    const auto sketches = sketches_of(shared_core_collection(), RankFamily::ws, 1, 256);
    const auto combo = scs(sketches);
    for (auto _ : state) {
        benchmark::DoNotOptimize(ml_union_scs(combo));
    }
}
BENCHMARK(BM_MlUnionSolve);

static void BM_PoissonBuild(benchmark::State& state) {
    const auto& coll = shared_core_collection();
    std::map<SetId, double> taus;
    for (const SetId& id : coll.set_ids()) {
        taus[id] = solve_tau_for_expected_size(coll.set_keys(id), RankFamily::pri, 256);
    }
    std::uint64_t seed = 0;
    for (auto _ : state) {
        benchmark::DoNotOptimize(build_coordinated_poisson(coll, RankFamily::pri, seed++, taus));
    }
}
BENCHMARK(BM_PoissonBuild);

BENCHMARK_MAIN();
