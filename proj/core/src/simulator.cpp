// Copyright (c) 2026, The neuron-io authors
// SPDX-License-Identifier: Apache-2.0

#include "neuron_io/simulator.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "neuron_io/error.hpp"
#include "neuron_io/geometry.hpp"
#include "neuron_io/random.hpp"

namespace neuron_io {

double swish(double x) noexcept {
    // x * sigmoid(x), written to avoid overflow of exp() for large |x|
    if (x >= 0.0) return x / (1.0 + std::exp(-x));
    const double e = std::exp(x);
    return x * e / (1.0 + e);
}

double gelu(double x) noexcept {
    return 0.5 * x * (1.0 + std::erf(x / std::numbers::sqrt2));
}

double activate(Activation kind, double x) noexcept {
    return kind == Activation::swish ? swish(x) : gelu(x);
}

GatedNeuron::GatedNeuron(OwnedTriple weights, Activation kind) : weights_(std::move(weights)), kind_(kind) {
    const auto d = weights_.gate.size();
    if (d == 0 || weights_.in.size() != d || weights_.out.size() != d) {
        throw UsageError("gated neuron needs three non-empty weight vectors of equal length");
    }
}

GatedNeuron::GatedNeuron(const WeightTriple& w, Activation kind)
    : GatedNeuron(OwnedTriple{{w.gate.begin(), w.gate.end()}, {w.in.begin(), w.in.end()}, {w.out.begin(), w.out.end()}},
                  kind) {}

NeuronOutput neuron_output(const GatedNeuron& neuron, std::span<const double> x_norm) {
    if (x_norm.size() != neuron.dim()) {
        throw UsageError("input has dimension " + std::to_string(x_norm.size()) + ", neuron has " +
                         std::to_string(neuron.dim()));
    }
    const auto& w = neuron.weights();
    NeuronOutput out;
    out.gate_preactivation = dot(std::span<const float>(w.gate), x_norm);
    out.in_preactivation = dot(std::span<const float>(w.in), x_norm);
    out.activation = activate(neuron.kind(), out.gate_preactivation) * out.in_preactivation;
    out.delta.resize(w.out.size());
    for (std::size_t j = 0; j < w.out.size(); ++j) out.delta[j] = out.activation * static_cast<double>(w.out[j]);
    return out;
}

namespace {

// Gaussian draw, orthogonalised against `basis` (unit vectors) and normalised.
std::vector<double> orthonormal_draw(Rng& rng, std::size_t d, const std::vector<std::vector<double>>& basis) {
    for (;;) {
        std::vector<double> v(d);
        for (auto& x : v) x = rng.normal();
        for (int pass = 0; pass < 2; ++pass) {
            for (const auto& b : basis) {
                const double p = dot(std::span<const double>(v), std::span<const double>(b));
                for (std::size_t k = 0; k < d; ++k) v[k] -= p * b[k];
            }
        }
        const double n = std::sqrt(squared_norm(std::span<const double>(v)));
        if (n > 1e-6) {
            for (auto& x : v) x /= n;
            return v;
        }
    }
}

std::vector<float> to_float(const std::vector<double>& v, double sign = 1.0) {
    std::vector<float> out(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) out[i] = static_cast<float>(sign * v[i]);
    return out;
}

}  // namespace

OwnedTriple prototype_triple(IOClass base, std::size_t d, std::uint64_t seed) {
    if (d < 3) throw UsageError("prototype neurons need d >= 3, got " + std::to_string(d));
    Rng rng(seed);
    const auto u = orthonormal_draw(rng, d, {});
    const auto v = orthonormal_draw(rng, d, {u});

    switch (base) {
        case IOClass::enrichment: return {to_float(u), to_float(u), to_float(u)};
        case IOClass::depletion: return {to_float(u), to_float(u), to_float(u, -1.0)};
        case IOClass::conditional_enrichment: return {to_float(v), to_float(u), to_float(u)};
        case IOClass::conditional_depletion: return {to_float(v), to_float(u), to_float(u, -1.0)};
        case IOClass::proportional_change: return {to_float(u), to_float(v), to_float(u)};
        case IOClass::orthogonal_output: {
            const auto w = orthonormal_draw(rng, d, {u, v});
            return {to_float(u), to_float(v), to_float(w)};
        }
    }
    throw UsageError("unknown IO class");
}

nlohmann::json run_scenario(const nlohmann::json& scenario) {
    try {
        const Activation kind = parse_activation(scenario.value("activation", std::string("swish")));
        const auto& spec = scenario.at("neuron");
        OwnedTriple weights;
        nlohmann::json neuron_desc;
        if (spec.contains("prototype")) {
            const auto base = parse_io_class(spec.at("prototype").get<std::string>());
            const auto dim = spec.value("dim", std::size_t{8});
            const auto seed = spec.value("seed", std::uint64_t{0});
            weights = prototype_triple(base, dim, seed);
            neuron_desc = {{"prototype", to_string(base)}, {"dim", dim}, {"seed", seed}};
        } else {
            weights.gate = spec.at("gate").get<std::vector<float>>();
            weights.in = spec.at("in").get<std::vector<float>>();
            weights.out = spec.at("out").get<std::vector<float>>();
        }
        const GatedNeuron neuron(weights, kind);
        neuron_desc["gate"] = neuron.weights().gate;
        neuron_desc["in"] = neuron.weights().in;
        neuron_desc["out"] = neuron.weights().out;

        nlohmann::json outputs = nlohmann::json::array();
        for (const auto& x : scenario.at("inputs")) {
            const auto xv = x.get<std::vector<double>>();
            const auto r = neuron_output(neuron, xv);
            outputs.push_back({{"x_gate", r.gate_preactivation},
                               {"x_in", r.in_preactivation},
                               {"activation", r.activation},
                               {"delta", r.delta}});
        }
        return {{"activation_kind", to_string(kind)}, {"neuron", neuron_desc}, {"outputs", outputs}};
    } catch (const nlohmann::json::exception& e) {
        throw DataError(std::string("invalid simulation scenario: ") + e.what());
    } catch (const DataError& e) {
        throw DataError(std::string("invalid simulation scenario: ") + e.what());
    } catch (const UsageError& e) {
        throw DataError(std::string("invalid simulation scenario: ") + e.what());
    }
}

}  // namespace neuron_io
