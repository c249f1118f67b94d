#include <benchmark/benchmark.h>

#include "virtsense/fac2t.hpp"
#include "virtsense/kmeans.hpp"
#include "virtsense/pca.hpp"
#include "virtsense/pipeline.hpp"
#include "virtsense/random.hpp"
#include "virtsense/regress.hpp"

using namespace virtsense;

namespace {

SyntheticCase small_case(std::size_t sensors, std::size_t blocks) {
    SyntheticSettings s;
    s.n_sensors = sensors;
    s.n_blocks = blocks;
    s.block_size = 500;
    return make_synthetic_case(s, 10, 7);
}

Matrix gaussian(std::size_t rows, std::size_t cols, std::uint64_t seed) {
    Rng rng(seed);
    Matrix m(rows, cols);
    for (auto& v : m.data()) v = rng.normal();
    return m;
}

}  // namespace

static void BM_Objective(benchmark::State& state) {
    const auto sc = small_case(static_cast<std::size_t>(state.range(0)), 10);
    const auto sol = cluster_all_blocks(sc.blocks, 10, 1).front();
    for (auto _ : state) benchmark::DoNotOptimize(objective(sol, sc.blocks));
}
BENCHMARK(BM_Objective)->Arg(60)->Arg(100)->Unit(benchmark::kMicrosecond);

static void BM_KMeans(benchmark::State& state) {
    const auto pts = gaussian(static_cast<std::size_t>(state.range(0)), 500, 3);
    std::uint64_t seed = 0;
    for (auto _ : state) benchmark::DoNotOptimize(kmeans(pts, 10, ++seed).inertia);
}
BENCHMARK(BM_KMeans)->Arg(60)->Arg(100)->Unit(benchmark::kMillisecond);

static void BM_Jacobi(benchmark::State& state) {
    const auto n = static_cast<std::size_t>(state.range(0));
    const auto cov = covariance_matrix(gaussian(4 * n, n, 5));
    for (auto _ : state) benchmark::DoNotOptimize(eigendecompose_sym(cov).values);
}
BENCHMARK(BM_Jacobi)->Arg(20)->Arg(60)->Arg(100)->Unit(benchmark::kMillisecond);

// One colony generation: mutation of every ant, pheromone update, selection.
static void BM_Fac2tIteration(benchmark::State& state) {
    const auto sc = small_case(100, 20);
    const auto init = cluster_all_blocks(sc.blocks, 10, 1);
    Fac2tParams p;
    auto [colony, pheromone] = init_colony(init, p, sc.blocks, 2);
    Rng rng(4);
    std::size_t iter = 1;
    for (auto _ : state) {
        Colony mutated;
        for (const auto& ant : colony.ants) {
            mutated.ants.push_back(mutate_ant(ant, pheromone, p.beta, iter, p.tau, rng));
            mutated.metrics.push_back(objective(mutated.ants.back(), sc.blocks));
        }
        pheromone = pheromone_update(pheromone, mutated, p.alpha);
        colony = select_survivors(colony, mutated);
        ++iter;
    }
}
BENCHMARK(BM_Fac2tIteration)->Unit(benchmark::kMillisecond);

static void BM_MlpGradient(benchmark::State& state) {
    const auto x = gaussian(256, 10, 6);
    const auto y = gaussian(256, 90, 7);
    const auto model = mlp_init(10, 90, MlpArchitecture{}, 8);
    for (auto _ : state) benchmark::DoNotOptimize(mlp_gradient(model, x, y).layers.size());
}
BENCHMARK(BM_MlpGradient)->Unit(benchmark::kMicrosecond);

static void BM_LbfrFit(benchmark::State& state) {
    const auto x = gaussian(5000, 10, 9);
    const auto y = gaussian(5000, 90, 10);
    for (auto _ : state) benchmark::DoNotOptimize(lbfr_fit(x, y).weights.rows());
}
BENCHMARK(BM_LbfrFit)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
