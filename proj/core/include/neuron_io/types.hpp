// Copyright (c) 2026, The neuron-io authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <compare>
#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace neuron_io {

enum class Activation { swish, gelu };

[[nodiscard]] std::string_view to_string(Activation kind);
[[nodiscard]] Activation parse_activation(std::string_view name);

/// A neuron address, rendered "layer.index" (e.g. 28.4737).
struct NeuronId {
    std::size_t layer = 0;
    std::size_t index = 0;

    [[nodiscard]] std::string str() const;
    [[nodiscard]] static NeuronId parse(std::string_view text);

    friend auto operator<=>(const NeuronId&, const NeuronId&) = default;
};

/// Non-owning view of one neuron's gate, linear-input and output weights.
struct WeightTriple {
    std::span<const float> gate;
    std::span<const float> in;
    std::span<const float> out;

    [[nodiscard]] std::size_t dim() const noexcept { return gate.size(); }
};

/// Owning counterpart of WeightTriple for synthesized neurons.
struct OwnedTriple {
    std::vector<float> gate;
    std::vector<float> in;
    std::vector<float> out;

    [[nodiscard]] WeightTriple view() const noexcept { return {gate, in, out}; }
};

/// Pairwise cosines of a neuron's three weight vectors.
struct CosineTriple {
    double gate_in = 0.0;
    double gate_out = 0.0;
    double in_out = 0.0;

    friend bool operator==(const CosineTriple&, const CosineTriple&) = default;
};

}  // namespace neuron_io
