// Copyright (c) 2026, The neuron-io authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "neuron_io/matrix.hpp"
#include "neuron_io/random.hpp"
#include "neuron_io/types.hpp"

namespace neuron_io::testing {

// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
public:
    TempDir();
    ~TempDir();
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;

    [[nodiscard]] const std::filesystem::path& path() const noexcept { return path_; }
    [[nodiscard]] std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

private:
    std::filesystem::path path_;
};

// Three vectors in R^d whose pairwise cosines are `c`, obtained from the
// Cholesky factor of the 3x3 Gram matrix. Components beyond the third are 0.
[[nodiscard]] OwnedTriple triple_with_cosines(const CosineTriple& c, std::size_t d = 8, double scale = 1.0);

// Central moments by the textbook definition in long double, two passes.
struct BruteMoments {
    long double variance;
    long double skew;
    long double excess_kurtosis;
};
[[nodiscard]] BruteMoments brute_force_moments(std::span<const double> values);

// Unembedding with a known decomposition and exactly representable entries.
// The model-space basis is block-diagonal with 2x2 blocks [[3, 4], [-4, 3]] / 5:
// u_0 = (3, -4, 0, 0, ...) / 5, u_1 = (4, 3, 0, 0, ...) / 5, u_2 = (0, 0, 3, -4, ...) / 5
// and so on. Token 2j has row sigma_j * 3/5 * u_j, token 2j+1 has sigma_j * 4/5 * u_j,
// so W_U = sum_j sigma_j t_j u_j^T with orthonormal t_j. `sigmas` must have even
// length d_model and be multiples of 25 for every entry to be an integer.
[[nodiscard]] Matrix exact_svd_unembed(const std::vector<double>& sigmas);
// 5 * u_j of the fixture above (integer entries, norm 5).
[[nodiscard]] std::vector<float> exact_svd_direction(std::size_t j, std::size_t d_model);

[[nodiscard]] std::vector<float> gaussian_vector(Rng& rng, std::size_t d);
[[nodiscard]] std::vector<double> gaussian_vector_f64(Rng& rng, std::size_t d);

[[nodiscard]] std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, const std::string& text);

}  // namespace neuron_io::testing
