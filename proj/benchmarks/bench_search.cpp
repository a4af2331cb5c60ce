#include <benchmark/benchmark.h>

#include "llmwiki/search_index.hpp"
#include "random_wiki.hpp"

using namespace llmwiki;

static void BM_BuildIndex(benchmark::State& state) {
    testing::Rng rng(7);
    auto wiki = testing::random_valid_wiki(rng, static_cast<std::size_t>(state.range(0)));
    for (auto _ : state) benchmark::DoNotOptimize(SearchIndex::build(wiki));
    state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_BuildIndex)->Range(16, 1024)->Complexity();

static void BM_Search(benchmark::State& state) {
    testing::Rng rng(7);
    auto index = SearchIndex::build(testing::random_valid_wiki(rng, static_cast<std::size_t>(state.range(0))));
    for (auto _ : state) benchmark::DoNotOptimize(index.search("Anhalt prince born June", 10));
    state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_Search)->Range(16, 1024)->Complexity();
