// Copyright (c) 2026, The neuron-io authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include <nlohmann/json.hpp>

#include "neuron_io/taxonomy.hpp"
#include "neuron_io/types.hpp"

namespace neuron_io {

// x * sigmoid(x), beta = 1 (SiLU).
[[nodiscard]] double swish(double x) noexcept;
// x * Phi(x) with the exact erf form.
[[nodiscard]] double gelu(double x) noexcept;
[[nodiscard]] double activate(Activation kind, double x) noexcept;

/// A single gated MLP neuron: Act(w_gate . x) * (w_in . x) * w_out.
class GatedNeuron {
public:
    // Throws UsageError on mismatched or empty vectors.
    GatedNeuron(OwnedTriple weights, Activation kind);
    GatedNeuron(const WeightTriple& weights, Activation kind);

    [[nodiscard]] const OwnedTriple& weights() const noexcept { return weights_; }
    [[nodiscard]] Activation kind() const noexcept { return kind_; }
    [[nodiscard]] std::size_t dim() const noexcept { return weights_.gate.size(); }

private:
    OwnedTriple weights_;
    Activation kind_;
};

struct NeuronOutput {
    double gate_preactivation = 0.0;  // w_gate . x_norm
    double in_preactivation = 0.0;    // w_in . x_norm
    double activation = 0.0;          // Act(x_gate) * x_in
    std::vector<double> delta;        // activation * w_out
};

// Throws UsageError on a dimension mismatch.
[[nodiscard]] NeuronOutput neuron_output(const GatedNeuron& neuron, std::span<const double> x_norm);

// Unit vectors realising the prototypical geometry of `base`; u and v are
// orthonormal directions drawn from `seed`. Throws UsageError for d < 3.
[[nodiscard]] OwnedTriple prototype_triple(IOClass base, std::size_t d, std::uint64_t seed);

// Runs a scenario document:
//   {"neuron": {"gate": [...], "in": [...], "out": [...]} | {"prototype": "depletion", "dim": 8, "seed": 1},
//    "activation": "swish" | "gelu", "inputs": [[...], ...]}
// and returns {"activation_kind", "neuron": {...}, "outputs": [{"x_gate", "x_in", "activation", "delta"}]}.
[[nodiscard]] nlohmann::json run_scenario(const nlohmann::json& scenario);

}  // namespace neuron_io
