// Copyright (c) 2026, The neuron-io authors
// SPDX-License-Identifier: Apache-2.0

#include "neuron_io/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "neuron_io/error.hpp"
#include "neuron_io/parallel.hpp"

namespace neuron_io {

namespace {

// Four interleaved accumulators, combined pairwise. The order is fixed so a
// given pair of inputs always yields the same bits.
template <typename A, typename B>
double dot_impl(std::span<const A> u, std::span<const B> v) {
    if (u.size() != v.size()) {
        throw UsageError("vector length mismatch: " + std::to_string(u.size()) + " vs " + std::to_string(v.size()));
    }
    double acc[4] = {0.0, 0.0, 0.0, 0.0};
    const std::size_t n = u.size();
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        acc[0] += static_cast<double>(u[i]) * static_cast<double>(v[i]);
        acc[1] += static_cast<double>(u[i + 1]) * static_cast<double>(v[i + 1]);
        acc[2] += static_cast<double>(u[i + 2]) * static_cast<double>(v[i + 2]);
        acc[3] += static_cast<double>(u[i + 3]) * static_cast<double>(v[i + 3]);
    }
    for (; i < n; ++i) acc[i % 4] += static_cast<double>(u[i]) * static_cast<double>(v[i]);
    return (acc[0] + acc[1]) + (acc[2] + acc[3]);
}

}  // namespace

double dot(std::span<const float> u, std::span<const float> v) { return dot_impl(u, v); }
double dot(std::span<const double> u, std::span<const double> v) { return dot_impl(u, v); }
double dot(std::span<const float> u, std::span<const double> v) { return dot_impl(u, v); }

double squared_norm(std::span<const float> u) { return dot_impl(u, u); }
double squared_norm(std::span<const double> u) { return dot_impl(u, u); }

double cosine_from_parts(double dot_uv, double sq_norm_u, double sq_norm_v) {
    if (!(sq_norm_u > 0.0) || !(sq_norm_v > 0.0)) throw NumericalError("cosine of a zero-norm vector");
    const double c = dot_uv / (std::sqrt(sq_norm_u) * std::sqrt(sq_norm_v));
    if (!std::isfinite(c) || std::abs(c) > 1.0 + kCosineSlack) {
        throw NumericalError("cosine " + std::to_string(c) + " outside [-1, 1] beyond rounding slack");
    }
    return std::clamp(c, -1.0, 1.0);
}

double cosine(std::span<const float> u, std::span<const float> v) {
    return cosine_from_parts(dot(u, v), squared_norm(u), squared_norm(v));
}

double cosine(std::span<const double> u, std::span<const double> v) {
    return cosine_from_parts(dot(u, v), squared_norm(u), squared_norm(v));
}

double cosine(std::span<const float> u, std::span<const double> v) {
    return cosine_from_parts(dot(u, v), squared_norm(u), squared_norm(v));
}

CosineTriple cosine_triple(const WeightTriple& t) {
    return {cosine(t.gate, t.in), cosine(t.gate, t.out), cosine(t.in, t.out)};
}

std::vector<NeuronCosines> cosine_triples(const LayerWeights& layer) {
    const std::size_t n = layer.gate.rows();
    std::vector<NeuronCosines> out(n);
    parallel_for(n, [&](std::size_t begin, std::size_t end) {
        for (std::size_t i = begin; i < end; ++i) {
            const auto g = layer.gate.row(i);
            const auto in = layer.in.row(i);
            const auto o = layer.out.row(i);
            const double ng = squared_norm(g);
            const double ni = squared_norm(in);
            const double no = squared_norm(o);
            if (ng == 0.0 || ni == 0.0 || no == 0.0) {
                out[i].degenerate = true;
                continue;
            }
            out[i].cos = {cosine_from_parts(dot(g, in), ng, ni), cosine_from_parts(dot(g, o), ng, no),
                          cosine_from_parts(dot(in, o), ni, no)};
        }
    });
    return out;
}

double gram_determinant(const CosineTriple& c) {
    const double a = c.gate_in;
    const double b = c.gate_out;
    const double d = c.in_out;
    return 1.0 + 2.0 * a * b * d - a * a - b * b - d * d;
}

}  // namespace neuron_io
