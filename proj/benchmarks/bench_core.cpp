// Copyright (c) 2026, The neuron-io authors
// SPDX-License-Identifier: Apache-2.0

#include <string>
#include <vector>

#include <benchmark/benchmark.h>

#include "neuron_io/geometry.hpp"
#include "neuron_io/random.hpp"
#include "neuron_io/roles.hpp"
#include "neuron_io/synthetic.hpp"
#include "neuron_io/taxonomy.hpp"
#include "neuron_io/vocab_lens.hpp"

using namespace neuron_io;

namespace {

// One layer of d_mlp neurons at d_model 1024.
void BM_CosineTriples(benchmark::State& state) {
    const auto model = make_gaussian_model(1, static_cast<std::size_t>(state.range(0)), 1024, 0, 1);
    for (auto _ : state) benchmark::DoNotOptimize(cosine_triples(model.layers[0]));
    state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_CosineTriples)->Arg(1024)->Arg(4096)->Unit(benchmark::kMillisecond);

void BM_ClassifyTriple(benchmark::State& state) {
    Rng rng(3);
    std::vector<CosineTriple> triples(4096);
    for (auto& t : triples) t = {2 * rng.uniform() - 1, 2 * rng.uniform() - 1, 2 * rng.uniform() - 1};
    for (auto _ : state) {
        for (const auto& t : triples) benchmark::DoNotOptimize(classify(t, 0.5));
    }
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(triples.size()));
}
BENCHMARK(BM_ClassifyTriple);

void BM_Moments(benchmark::State& state) {
    Rng rng(5);
    std::vector<double> v(static_cast<std::size_t>(state.range(0)));
    for (auto& x : v) x = rng.normal();
    for (auto _ : state) benchmark::DoNotOptimize(moments(v));
    state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_Moments)->Arg(512)->Arg(32768);

void BM_TopTokens(benchmark::State& state) {
    const std::size_t d_vocab = static_cast<std::size_t>(state.range(0));
    const auto model = make_gaussian_model(1, 4, 512, d_vocab, 11);
    Vocabulary vocab;
    for (std::size_t t = 0; t < d_vocab; ++t) vocab.tokens.push_back("tok" + std::to_string(t));
    const auto w = model.layers[0].out.row(0);
    for (auto _ : state) benchmark::DoNotOptimize(top_tokens(w, model, vocab, 20));
}
BENCHMARK(BM_TopTokens)->Arg(8192)->Arg(32768)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
