// Copyright (c) 2026, The neuron-io authors
// SPDX-License-Identifier: Apache-2.0

#include "support.hpp"

#include <cmath>
#include <fstream>
#include <random>
#include <sstream>
#include <stdexcept>

namespace neuron_io::testing {

TempDir::TempDir() {
    std::random_device rd;
    const auto base = std::filesystem::temp_directory_path();
    for (int attempt = 0; attempt < 100; ++attempt) {
        auto candidate = base / ("neuron-io-test-" + std::to_string(rd()));
        if (std::filesystem::create_directory(candidate)) {
            path_ = std::move(candidate);
            return;
        }
    }
    throw std::runtime_error("could not create a temporary directory");
}

TempDir::~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
}

OwnedTriple triple_with_cosines(const CosineTriple& c, std::size_t d, double scale) {
    if (d < 3) throw std::invalid_argument("triple_with_cosines needs d >= 3");
    // Gram matrix [[1, a, b], [a, 1, e], [b, e, 1]] = L L^T.
    const double a = c.gate_in;
    const double b = c.gate_out;
    const double e = c.in_out;
    const double l11 = std::sqrt(1.0 - a * a);
    const double l21 = (e - a * b) / l11;
    const double l22sq = 1.0 - b * b - l21 * l21;
    if (!(l22sq >= 0.0)) throw std::invalid_argument("cosines do not form a positive semidefinite Gram matrix");
    const double l22 = std::sqrt(l22sq);
    OwnedTriple t{std::vector<float>(d, 0.0f), std::vector<float>(d, 0.0f), std::vector<float>(d, 0.0f)};
    t.gate[0] = static_cast<float>(scale);
    t.in[0] = static_cast<float>(scale * a);
    t.in[1] = static_cast<float>(scale * l11);
    t.out[0] = static_cast<float>(scale * b);
    t.out[1] = static_cast<float>(scale * l21);
    t.out[2] = static_cast<float>(scale * l22);
    return t;
}

BruteMoments brute_force_moments(std::span<const double> values) {
    const auto n = static_cast<long double>(values.size());
    long double mean = 0.0L;
    for (double v : values) mean += v;
    mean /= n;
    long double m2 = 0.0L;
    long double m3 = 0.0L;
    long double m4 = 0.0L;
    for (double v : values) {
        const long double d = static_cast<long double>(v) - mean;
        m2 += d * d;
        m3 += d * d * d;
        m4 += d * d * d * d;
    }
    m2 /= n;
    m3 /= n;
    m4 /= n;
    return {m2, m3 / std::pow(m2, 1.5L), m4 / (m2 * m2) - 3.0L};
}

std::vector<float> exact_svd_direction(std::size_t j, std::size_t d_model) {
    if (d_model % 2 != 0 || j >= d_model) throw std::invalid_argument("exact_svd_direction: bad arguments");
    std::vector<float> u(d_model, 0.0f);
    const std::size_t b = 2 * (j / 2);
    if (j % 2 == 0) {
        u[b] = 3.0f;
        u[b + 1] = -4.0f;
    } else {
        u[b] = 4.0f;
        u[b + 1] = 3.0f;
    }
    return u;
}

Matrix exact_svd_unembed(const std::vector<double>& sigmas) {
    const std::size_t d = sigmas.size();
    if (d % 2 != 0) throw std::invalid_argument("exact_svd_unembed needs an even number of singular values");
    Matrix w(2 * d, d);
    for (std::size_t j = 0; j < d; ++j) {
        const auto u = exact_svd_direction(j, d);  // 5 u_j
        for (std::size_t c = 0; c < d; ++c) {
            // sigma * (3/5) * u_j = sigma * 3 * (5 u_j) / 25
            w(2 * j, c) = static_cast<float>(sigmas[j] * 3.0 * u[c] / 25.0);
            w(2 * j + 1, c) = static_cast<float>(sigmas[j] * 4.0 * u[c] / 25.0);
        }
    }
    return w;
}

std::vector<float> gaussian_vector(Rng& rng, std::size_t d) {
    std::vector<float> v(d);
    for (auto& x : v) x = static_cast<float>(rng.normal());
    return v;
}

std::vector<double> gaussian_vector_f64(Rng& rng, std::size_t d) {
    std::vector<double> v(d);
    for (auto& x : v) x = rng.normal();
    return v;
}

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot read " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    out << text;
}

}  // namespace neuron_io::testing
