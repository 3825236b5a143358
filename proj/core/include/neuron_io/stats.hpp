// Copyright (c) 2026, The neuron-io authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "neuron_io/roles.hpp"
#include "neuron_io/taxonomy.hpp"

namespace neuron_io {

/// Tukey box: quartiles by linear interpolation between order statistics,
/// whiskers at the most extreme datum within 1.5 IQR of the box.
struct BoxStats {
    std::size_t count = 0;
    double min = 0.0;
    double max = 0.0;
    double median = 0.0;
    double q1 = 0.0;
    double q3 = 0.0;
    double whisker_low = 0.0;
    double whisker_high = 0.0;
    std::vector<std::pair<NeuronId, double>> outliers;  // ordered by (value, id)
};

// Linear-interpolation quantile of sorted data, p in [0, 1].
[[nodiscard]] double quantile_sorted(std::span<const double> sorted, double p);

// `ids` may be empty, in which case outliers carry default ids.
[[nodiscard]] BoxStats box_stats(std::span<const double> values, std::span<const NeuronId> ids = {});

enum class Channel { abs_gate_in, abs_gate_out, in_out };
inline constexpr std::array<Channel, 3> kAllChannels = {Channel::abs_gate_in, Channel::abs_gate_out,
                                                        Channel::in_out};
[[nodiscard]] std::string_view to_string(Channel c);
[[nodiscard]] double channel_value(const CosineTriple& t, Channel c);

using LabelCounts = std::array<std::size_t, kLabelCount>;  // indexed by IOLabel::index()

// One entry per layer (n_layers of the table). Throws DataError on an empty table.
[[nodiscard]] std::vector<LabelCounts> class_distribution(const ClassificationTable& table);

// Per layer, per channel. Throws DataError when some layer has no classified neuron.
[[nodiscard]] std::vector<std::array<BoxStats, 3>> layer_boxstats(const ClassificationTable& table);

struct MedianCurve {
    std::string model;
    std::vector<std::pair<double, double>> points;  // (relative depth, median cos(w_in, w_out))
};

// relative depth = layer / (n_layers - 1), 0 for single-layer models.
[[nodiscard]] MedianCurve median_curve(const ClassificationTable& table);
[[nodiscard]] std::vector<MedianCurve> median_curves(std::span<const ClassificationTable> tables);

struct ContingencyTable {
    std::array<std::array<std::size_t, kRoleCount>, kLabelCount> counts{};
    std::array<std::size_t, kLabelCount> row_totals{};
    std::array<std::size_t, kRoleCount> column_totals{};
    std::size_t total = 0;
};

// Throws DataError when the two tables do not cover the same neurons.
[[nodiscard]] ContingencyTable contingency(const ClassificationTable& io, const RoleTable& roles);

struct LayerSummary {
    std::size_t layer = 0;
    LabelCounts counts{};
    std::array<BoxStats, 3> box;
};

/// Everything `stats` writes and `plot` reads.
struct Report {
    std::string model;
    double tau = kDefaultTau;
    std::size_t n_layers = 0;
    std::size_t degenerate = 0;
    std::vector<LayerSummary> layers;
    MedianCurve medians;
    std::optional<ContingencyTable> contingency;
};

[[nodiscard]] Report build_report(const ClassificationTable& table, const RoleTable* roles = nullptr);

// {model, tau, layers: [{layer, counts: {label: n}, box: {channel: BoxStats}}], medians: [...]}
[[nodiscard]] nlohmann::json to_json(const Report& report);
[[nodiscard]] Report report_from_json(const nlohmann::json& j);

}  // namespace neuron_io
