#include <benchmark/benchmark.h>

#include "llmwiki/repair.hpp"
#include "llmwiki/validation.hpp"
#include "random_wiki.hpp"

using namespace llmwiki;

static void BM_ValidateFull(benchmark::State& state) {
    testing::Rng rng(3);
    auto wiki = testing::random_valid_wiki(rng, static_cast<std::size_t>(state.range(0)));
    for (auto _ : state) benchmark::DoNotOptimize(validate_structural(wiki, {}, {}));
    state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_ValidateFull)->Range(16, 1024)->Complexity();

static void BM_ValidateAndFixSeeded(benchmark::State& state) {
    testing::Rng rng(5);
    auto c = testing::seeded_case(rng, 50);
    for (auto _ : state) {
        auto errors = validate_structural(c.base, c.update, c.selected);
        benchmark::DoNotOptimize(code_auto_fix(c.base, c.update, errors));
    }
}
BENCHMARK(BM_ValidateAndFixSeeded);
