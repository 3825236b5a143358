// Copyright (c) 2026, The neuron-io authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <span>
#include <vector>

#include "neuron_io/types.hpp"
#include "neuron_io/weights.hpp"

namespace neuron_io {

// Components within this distance outside [-1, 1] are rounding and get clamped;
// anything further out is reported as a NumericalError.
inline constexpr double kCosineSlack = 1e-6;

// f64-accumulated dot product with a fixed summation order.
[[nodiscard]] double dot(std::span<const float> u, std::span<const float> v);
[[nodiscard]] double dot(std::span<const double> u, std::span<const double> v);
[[nodiscard]] double dot(std::span<const float> u, std::span<const double> v);

[[nodiscard]] double squared_norm(std::span<const float> u);
[[nodiscard]] double squared_norm(std::span<const double> u);

// Cosine from a dot product and the two squared norms; clamps within
// kCosineSlack and throws NumericalError beyond it.
[[nodiscard]] double cosine_from_parts(double dot_uv, double sq_norm_u, double sq_norm_v);

// Throws UsageError on length mismatch and NumericalError on a zero-norm input.
[[nodiscard]] double cosine(std::span<const float> u, std::span<const float> v);
[[nodiscard]] double cosine(std::span<const double> u, std::span<const double> v);
[[nodiscard]] double cosine(std::span<const float> u, std::span<const double> v);

[[nodiscard]] CosineTriple cosine_triple(const WeightTriple& t);

struct NeuronCosines {
    CosineTriple cos;
    bool degenerate = false;  // some weight vector has zero norm; `cos` is all zeros
};

// One entry per neuron, bit-identical to calling cosine() pairwise.
[[nodiscard]] std::vector<NeuronCosines> cosine_triples(const LayerWeights& layer);

// det of the 3x3 Gram matrix [[1,gi,go],[gi,1,io],[go,io,1]]; >= 0 for real vectors.
[[nodiscard]] double gram_determinant(const CosineTriple& c);

}  // namespace neuron_io
