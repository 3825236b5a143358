// Copyright (c) 2026, The neuron-io authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

#include "neuron_io/taxonomy.hpp"
#include "neuron_io/weights.hpp"

namespace neuron_io {

// Model whose layers are filled with prototype neurons. When `layer_classes`
// is empty every layer holds `per_class` prototypes of each of the six base
// classes, in kAllClasses order. Otherwise there is one layer per entry and
// layer l holds 6 * per_class prototypes of layer_classes[l] alone.
struct PrototypeModelSpec {
    std::size_t n_layers = 2;
    std::size_t per_class = 4;
    std::size_t d_model = 16;
    std::size_t d_vocab = 0;  // adds a Gaussian unembedding when > 0
    std::uint64_t seed = 1;
    std::vector<IOClass> layer_classes;
};

[[nodiscard]] ModelWeights make_prototype_model(const PrototypeModelSpec& spec);

// I.i.d. standard normal weights.
[[nodiscard]] ModelWeights make_gaussian_model(std::size_t n_layers, std::size_t d_mlp, std::size_t d_model,
                                               std::size_t d_vocab, std::uint64_t seed);

}  // namespace neuron_io
