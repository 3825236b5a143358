// Copyright (c) 2026, The neuron-io authors
// SPDX-License-Identifier: Apache-2.0

#include <algorithm>
#include <cmath>
#include <numeric>

#include <Eigen/Dense>

#include "neuron_io/error.hpp"
#include "neuron_io/geometry.hpp"
#include "neuron_io/roles.hpp"

namespace neuron_io {

// The left singular vectors of W_U (d_model x d_vocab) are the eigenvectors of
// W_U W_U^T, accumulated in f64 from row blocks of the token-major store. This
// keeps memory at d_model^2 instead of a f64 copy of the whole unembedding.
UnembedSpectrum::UnembedSpectrum(const Matrix& unembed) {
    const std::size_t d = unembed.cols();
    if (d == 0 || unembed.rows() == 0) throw DataError("cannot decompose an empty unembedding");

    Eigen::MatrixXd gram = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(d));
    constexpr std::size_t kBlock = 1024;
    Eigen::MatrixXd block;
    for (std::size_t start = 0; start < unembed.rows(); start += kBlock) {
        const std::size_t rows = std::min(kBlock, unembed.rows() - start);
        block.resize(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(d));
        for (std::size_t r = 0; r < rows; ++r) {
            const auto src = unembed.row(start + r);
            for (std::size_t c = 0; c < d; ++c) block(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = src[c];
        }
        gram.selfadjointView<Eigen::Lower>().rankUpdate(block.transpose());
    }
    gram = gram.selfadjointView<Eigen::Lower>();

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(gram);
    if (solver.info() != Eigen::Success) throw NumericalError("singular value decomposition of the unembedding did not converge");

    // Eigen returns ascending eigenvalues; store descending singular values.
    singular_values_.resize(d);
    vectors_.resize(d * d);
    for (std::size_t j = 0; j < d; ++j) {
        const auto src = static_cast<Eigen::Index>(d - 1 - j);
        singular_values_[j] = std::sqrt(std::max(0.0, solver.eigenvalues()(src)));
        for (std::size_t k = 0; k < d; ++k) vectors_[j * d + k] = solver.eigenvectors()(static_cast<Eigen::Index>(k), src);
    }
}

std::vector<double> UnembedSpectrum::direction(std::size_t j) const {
    const std::size_t d = d_model();
    if (j >= d) throw UsageError("singular direction index out of range");
    return {vectors_.begin() + static_cast<std::ptrdiff_t>(j * d), vectors_.begin() + static_cast<std::ptrdiff_t>((j + 1) * d)};
}

double UnembedSpectrum::null_space_fraction(std::span<const float> w_out, std::size_t k) const {
    const std::size_t d = d_model();
    if (w_out.size() != d) throw UsageError("w_out has dimension " + std::to_string(w_out.size()) + ", unembedding has " + std::to_string(d));
    if (k == 0 || k > d) throw UsageError("null-space size k must lie in [1, d_model], got " + std::to_string(k));
    const double norm2 = squared_norm(w_out);
    if (!(norm2 > 0.0)) throw NumericalError("null-space fraction of a zero-norm w_out");
    double projected = 0.0;
    for (std::size_t j = d - k; j < d; ++j) {
        const double p = dot(w_out, std::span<const double>(vectors_.data() + j * d, d));
        projected += p * p;
    }
    return std::clamp(std::sqrt(projected / norm2), 0.0, 1.0);
}

double null_space_fraction(std::span<const float> w_out, const Matrix& unembed, std::size_t k) {
    return UnembedSpectrum(unembed).null_space_fraction(w_out, k);
}

}  // namespace neuron_io
