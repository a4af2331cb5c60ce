#include <benchmark/benchmark.h>

#include "llmwiki/codec.hpp"
#include "random_wiki.hpp"

using namespace llmwiki;

static void BM_RenderPage(benchmark::State& state) {
    testing::Rng rng(11);
    auto page = testing::random_page(rng, *SlugPath::parse("people/Bench-Page"));
    for (auto _ : state) benchmark::DoNotOptimize(render_page(page));
}
BENCHMARK(BM_RenderPage);

static void BM_ParsePage(benchmark::State& state) {
    testing::Rng rng(11);
    auto path = *SlugPath::parse("people/Bench-Page");
    auto text = render_page(testing::random_page(rng, path));
    for (auto _ : state) benchmark::DoNotOptimize(parse_page(text, path));
    state.SetBytesProcessed(static_cast<std::int64_t>(state.iterations() * text.size()));
}
BENCHMARK(BM_ParsePage);
