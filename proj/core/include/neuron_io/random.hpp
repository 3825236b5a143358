// Copyright (c) 2026, The neuron-io authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <random>

namespace neuron_io {

/// Portable seeded generator. std::mt19937_64 output is fully specified by the
/// standard; the distributions below are implemented here rather than taken
/// from <random>, whose distributions vary between standard libraries.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    [[nodiscard]] std::uint64_t next() { return engine_(); }
    // Uniform in [0, 1) with 53 random bits.
    [[nodiscard]] double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
    // Uniform integer in [0, n) by rejection.
    [[nodiscard]] std::uint64_t below(std::uint64_t n);
    // Standard normal via Box-Muller.
    [[nodiscard]] double normal();

private:
    std::mt19937_64 engine_;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

}  // namespace neuron_io
