// Copyright (c) 2026, The neuron-io authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace neuron_io {

/// Dense row-major f32 matrix. Rows are the unit of access throughout the
/// library: one row per neuron for MLP weights, one row per token for
/// embedding and unembedding matrices.
class Matrix {
public:
    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_(rows * cols, 0.0f) {}
    Matrix(std::size_t rows, std::size_t cols, std::vector<float> data);

    [[nodiscard]] std::size_t rows() const noexcept { return rows_; }
    [[nodiscard]] std::size_t cols() const noexcept { return cols_; }
    [[nodiscard]] bool empty() const noexcept { return data_.empty(); }

    [[nodiscard]] std::span<const float> row(std::size_t r) const noexcept {
        return {data_.data() + r * cols_, cols_};
    }
    [[nodiscard]] std::span<float> row(std::size_t r) noexcept { return {data_.data() + r * cols_, cols_}; }

    [[nodiscard]] float operator()(std::size_t r, std::size_t c) const noexcept { return data_[r * cols_ + c]; }
    [[nodiscard]] float& operator()(std::size_t r, std::size_t c) noexcept { return data_[r * cols_ + c]; }

    [[nodiscard]] std::span<const float> data() const noexcept { return data_; }
    [[nodiscard]] std::span<float> data() noexcept { return data_; }

    [[nodiscard]] Matrix transposed() const;

    friend bool operator==(const Matrix&, const Matrix&) = default;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<float> data_;
};

}  // namespace neuron_io
