// Microbenchmarks for the hot loops: histogram transforms, spatial filters,
// feature whitening, and Pegasos epochs. Run manually; not part of the suite.

#include <benchmark/benchmark.h>

#include "prepbench/bench.hpp"
#include "prepbench/filters.hpp"
#include "prepbench/normalize.hpp"
#include "prepbench/rng.hpp"
#include "prepbench/transforms.hpp"

using namespace prepbench;

namespace {

ImageBuffer seeded_image(int side, std::uint64_t seed) {
    ImageBuffer img = make_image(side, side, 1);
    CounterRng rng(seed);
    for (auto& p : img.pixels)
        p = static_cast<std::uint8_t>(rng.next_below(256));
    return img;
}

void bm_equalize(benchmark::State& state) {
    auto img = seeded_image(static_cast<int>(state.range(0)), 1);
    for (auto _ : state)
        benchmark::DoNotOptimize(equalize(img));
    state.SetItemsProcessed(state.iterations() * img.pixels.size());
}
BENCHMARK(bm_equalize)->Arg(64)->Arg(256);

void bm_mmsiche(benchmark::State& state) {
    auto img = seeded_image(static_cast<int>(state.range(0)), 2);
    for (auto _ : state)
        benchmark::DoNotOptimize(mmsiche(img));
    state.SetItemsProcessed(state.iterations() * img.pixels.size());
}
BENCHMARK(bm_mmsiche)->Arg(64)->Arg(256);

void bm_median(benchmark::State& state) {
    auto img = seeded_image(128, 3);
    for (auto _ : state)
        benchmark::DoNotOptimize(median_filter(img, static_cast<int>(state.range(0))));
}
BENCHMARK(bm_median)->Arg(3)->Arg(5);

void bm_wiener(benchmark::State& state) {
    auto img = seeded_image(128, 4);
    for (auto _ : state)
        benchmark::DoNotOptimize(wiener_filter(img, 5));
}
BENCHMARK(bm_wiener);

void bm_local_equalize(benchmark::State& state) {
    auto img = seeded_image(64, 5);
    for (auto _ : state)
        benchmark::DoNotOptimize(local_equalize(img, 9));
}
BENCHMARK(bm_local_equalize);

void bm_zca_fit(benchmark::State& state) {
    std::size_t d = static_cast<std::size_t>(state.range(0));
    FeatureMatrix x = make_matrix(500, d);
    CounterRng rng(6);
    for (auto& v : x.values)
        v = rng.next_unit();
    for (auto _ : state)
        benchmark::DoNotOptimize(fit_norm(NormKind::Zca, x, 1e-2));
}
BENCHMARK(bm_zca_fit)->Arg(16)->Arg(64);

void bm_svm_epoch(benchmark::State& state) {
    std::size_t n = 200, d = 256;
    FeatureMatrix x = make_matrix(n, d);
    CounterRng rng(7);
    std::vector<std::string> labels;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < d; ++j)
            x.at(i, j) = rng.next_unit();
        labels.push_back(i % 2 ? "a" : "b");
    }
    for (auto _ : state)
        benchmark::DoNotOptimize(svm_train(x, labels, 1e-3, 1, 0));
}
BENCHMARK(bm_svm_epoch);

} // namespace

BENCHMARK_MAIN();
