// Copyright (c) 2026, The neuron-io authors
// SPDX-License-Identifier: Apache-2.0

#include "neuron_io/synthetic.hpp"

#include <algorithm>

#include "neuron_io/error.hpp"
#include "neuron_io/random.hpp"
#include "neuron_io/simulator.hpp"

namespace neuron_io {

namespace {

Matrix gaussian_matrix(Rng& rng, std::size_t rows, std::size_t cols) {
    Matrix m(rows, cols);
    for (auto& v : m.data()) v = static_cast<float>(rng.normal());
    return m;
}

void put_row(Matrix& m, std::size_t r, const std::vector<float>& v) {
    std::copy(v.begin(), v.end(), m.row(r).begin());
}

}  // namespace

ModelWeights make_prototype_model(const PrototypeModelSpec& spec) {
    if (spec.per_class == 0) throw UsageError("per_class must be at least 1");
    const bool mixed = spec.layer_classes.empty();
    const std::size_t n_layers = mixed ? spec.n_layers : spec.layer_classes.size();
    const std::size_t d_mlp = spec.per_class * kAllClasses.size();

    ModelWeights model;
    model.meta.name = "prototype-fixture";
    model.meta.preset = "llama";
    std::uint64_t seed = spec.seed;
    for (std::size_t l = 0; l < n_layers; ++l) {
        LayerWeights lw{Matrix(d_mlp, spec.d_model), Matrix(d_mlp, spec.d_model), Matrix(d_mlp, spec.d_model)};
        for (std::size_t i = 0; i < d_mlp; ++i) {
            const IOClass base = mixed ? kAllClasses[i / spec.per_class] : spec.layer_classes[l];
            const auto t = prototype_triple(base, spec.d_model, seed++);
            put_row(lw.gate, i, t.gate);
            put_row(lw.in, i, t.in);
            put_row(lw.out, i, t.out);
        }
        model.layers.push_back(std::move(lw));
    }
    if (spec.d_vocab > 0) {
        Rng rng(spec.seed ^ 0x9e3779b97f4a7c15ull);
        model.unembed = std::make_shared<const Matrix>(gaussian_matrix(rng, spec.d_vocab, spec.d_model));
    }
    model.refresh_meta();
    return model;
}

ModelWeights make_gaussian_model(std::size_t n_layers, std::size_t d_mlp, std::size_t d_model, std::size_t d_vocab,
                                 std::uint64_t seed) {
    Rng rng(seed);
    ModelWeights model;
    model.meta.name = "gaussian-" + std::to_string(seed);
    model.meta.preset = "llama";
    for (std::size_t l = 0; l < n_layers; ++l) {
        model.layers.push_back({gaussian_matrix(rng, d_mlp, d_model), gaussian_matrix(rng, d_mlp, d_model),
                                gaussian_matrix(rng, d_mlp, d_model)});
    }
    if (d_vocab > 0) model.unembed = std::make_shared<const Matrix>(gaussian_matrix(rng, d_vocab, d_model));
    model.refresh_meta();
    return model;
}

}  // namespace neuron_io
