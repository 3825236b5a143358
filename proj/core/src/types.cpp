// Copyright (c) 2026, The neuron-io authors
// SPDX-License-Identifier: Apache-2.0

#include "neuron_io/types.hpp"

#include <charconv>
#include <string>

#include "neuron_io/error.hpp"
#include "neuron_io/matrix.hpp"

namespace neuron_io {

std::string_view to_string(Activation kind) {
    return kind == Activation::swish ? "swish" : "gelu";
}

Activation parse_activation(std::string_view name) {
    if (name == "swish" || name == "silu") return Activation::swish;
    if (name == "gelu") return Activation::gelu;
    throw UsageError("unknown activation '" + std::string(name) + "' (expected swish or gelu)");
}

std::string NeuronId::str() const {
    return std::to_string(layer) + "." + std::to_string(index);
}

NeuronId NeuronId::parse(std::string_view text) {
    const auto dot = text.find('.');
    auto bad = [&] { return UsageError("malformed neuron id '" + std::string(text) + "' (expected LAYER.INDEX)"); };
    if (dot == std::string_view::npos || dot == 0 || dot + 1 == text.size()) throw bad();
    NeuronId id;
    const auto* first = text.data();
    const auto* last = text.data() + text.size();
    auto [p1, e1] = std::from_chars(first, first + dot, id.layer);
    if (e1 != std::errc{} || p1 != first + dot) throw bad();
    auto [p2, e2] = std::from_chars(first + dot + 1, last, id.index);
    if (e2 != std::errc{} || p2 != last) throw bad();
    return id;
}

Matrix::Matrix(std::size_t rows, std::size_t cols, std::vector<float> data)
    : rows_(rows), cols_(cols), data_(std::move(data)) {
    if (data_.size() != rows * cols) {
        throw UsageError("matrix data has " + std::to_string(data_.size()) + " elements, expected " +
                         std::to_string(rows * cols));
    }
}

Matrix Matrix::transposed() const {
    Matrix t(cols_, rows_);
    for (std::size_t r = 0; r < rows_; ++r) {
        for (std::size_t c = 0; c < cols_; ++c) t.data_[c * rows_ + r] = data_[r * cols_ + c];
    }
    return t;
}

}  // namespace neuron_io
