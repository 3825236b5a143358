// Copyright (c) 2026, The neuron-io authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "neuron_io/stats.hpp"
#include "neuron_io/taxonomy.hpp"

namespace neuron_io {

enum class PlotKind {
    bars,     // class distribution by layer
    box,      // per-layer cosine boxplots
    scatter,  // cos(w_gate, w_out) vs cos(w_in, w_out), coloured by cos(w_gate, w_in)
    medians,  // median cos(w_in, w_out) against relative depth
};

[[nodiscard]] std::string_view to_string(PlotKind k);
[[nodiscard]] PlotKind parse_plot_kind(std::string_view s);  // throws UsageError

struct PlotSpec {
    PlotKind kind = PlotKind::bars;
    std::optional<std::vector<std::size_t>> layers;  // all layers when unset
    std::size_t max_points_per_layer = 20000;       // scatter downsampling
    std::uint64_t seed = 0;
    std::string title;
};

struct PlotData {
    std::vector<Report> reports;                     // bars/box use the first, medians all
    const ClassificationTable* classes = nullptr;    // scatter
};

// Diverging colour stops for cos(w_gate, w_in) at -1, 0, +1.
inline constexpr std::string_view kColorNegative = "#2166ac";
inline constexpr std::string_view kColorZero = "#f7f7f7";
inline constexpr std::string_view kColorPositive = "#b2182b";

[[nodiscard]] std::string diverging_color(double value);
[[nodiscard]] std::string_view label_color(const IOLabel& label);

// Standalone SVG 1.1. Byte-identical for identical inputs and seed. Every mark
// carries its source value in data-* attributes written in shortest round-trip form.
// Throws UsageError on empty or unsuitable data.
[[nodiscard]] std::string render(const PlotSpec& spec, const PlotData& data);

// The plotted values as CSV, one row per mark.
[[nodiscard]] std::string plot_data_csv(const PlotSpec& spec, const PlotData& data);

// Indices in [0, n) kept by seeded selection sampling, ascending. All of them when n <= limit.
[[nodiscard]] std::vector<std::size_t> sample_indices(std::size_t n, std::size_t limit, std::uint64_t seed);

}  // namespace neuron_io
