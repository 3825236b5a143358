// Copyright (c) 2026, The neuron-io authors
// SPDX-License-Identifier: Apache-2.0

#include "neuron_io/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "neuron_io/error.hpp"

namespace neuron_io {

double quantile_sorted(std::span<const double> sorted, double p) {
    if (sorted.empty()) throw DataError("quantile of an empty sample");
    const double h = static_cast<double>(sorted.size() - 1) * p;
    const auto lo = static_cast<std::size_t>(std::floor(h));
    if (lo + 1 >= sorted.size()) return sorted.back();
    const double frac = h - static_cast<double>(lo);
    return sorted[lo] + frac * (sorted[lo + 1] - sorted[lo]);
}

BoxStats box_stats(std::span<const double> values, std::span<const NeuronId> ids) {
    if (values.empty()) throw DataError("box statistics of an empty sample");
    if (!ids.empty() && ids.size() != values.size()) throw UsageError("box_stats: ids and values differ in length");

    std::vector<std::size_t> order(values.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    auto id_of = [&](std::size_t i) { return ids.empty() ? NeuronId{} : ids[i]; };
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        if (values[a] != values[b]) return values[a] < values[b];
        return id_of(a) < id_of(b);
    });
    std::vector<double> sorted(values.size());
    for (std::size_t k = 0; k < order.size(); ++k) sorted[k] = values[order[k]];

    BoxStats b;
    b.count = sorted.size();
    b.min = sorted.front();
    b.max = sorted.back();
    b.median = quantile_sorted(sorted, 0.5);
    b.q1 = quantile_sorted(sorted, 0.25);
    b.q3 = quantile_sorted(sorted, 0.75);
    const double iqr = b.q3 - b.q1;
    const double lo_fence = b.q1 - 1.5 * iqr;
    const double hi_fence = b.q3 + 1.5 * iqr;

    b.whisker_low = b.q1;
    b.whisker_high = b.q3;
    bool low_set = false;
    for (std::size_t k = 0; k < sorted.size(); ++k) {
        const double v = sorted[k];
        if (v < lo_fence || v > hi_fence) {
            b.outliers.emplace_back(id_of(order[k]), v);
            continue;
        }
        if (!low_set) {
            b.whisker_low = v;
            low_set = true;
        }
        b.whisker_high = v;
    }
    return b;
}

std::string_view to_string(Channel c) {
    switch (c) {
        case Channel::abs_gate_in: return "abs_cos_gate_in";
        case Channel::abs_gate_out: return "abs_cos_gate_out";
        case Channel::in_out: return "cos_in_out";
    }
    return "?";
}

double channel_value(const CosineTriple& t, Channel c) {
    switch (c) {
        case Channel::abs_gate_in: return std::abs(t.gate_in);
        case Channel::abs_gate_out: return std::abs(t.gate_out);
        case Channel::in_out: return t.in_out;
    }
    return 0.0;
}

std::vector<LabelCounts> class_distribution(const ClassificationTable& table) {
    if (table.records.empty()) throw DataError("class distribution of an empty classification table");
    std::vector<LabelCounts> counts(table.n_layers, LabelCounts{});
    for (const auto& r : table.records) {
        if (r.id.layer >= counts.size()) counts.resize(r.id.layer + 1, LabelCounts{});
        ++counts[r.id.layer][r.label.index()];
    }
    return counts;
}

namespace {

// Record ranges per layer; records are sorted by (layer, index).
std::vector<std::span<const ClassifiedNeuron>> by_layer(const ClassificationTable& table) {
    std::vector<std::span<const ClassifiedNeuron>> out(table.n_layers);
    std::size_t start = 0;
    const auto& rs = table.records;
    while (start < rs.size()) {
        std::size_t end = start;
        while (end < rs.size() && rs[end].id.layer == rs[start].id.layer) ++end;
        const std::size_t layer = rs[start].id.layer;
        if (layer >= out.size()) out.resize(layer + 1);
        out[layer] = std::span<const ClassifiedNeuron>(rs.data() + start, end - start);
        start = end;
    }
    return out;
}

}  // namespace

std::vector<std::array<BoxStats, 3>> layer_boxstats(const ClassificationTable& table) {
    if (table.records.empty()) throw DataError("box statistics of an empty classification table");
    const auto layers = by_layer(table);
    std::vector<std::array<BoxStats, 3>> out(layers.size());
    for (std::size_t l = 0; l < layers.size(); ++l) {
        if (layers[l].empty()) throw DataError("layer " + std::to_string(l) + " has no classified neurons");
        std::vector<NeuronId> ids;
        ids.reserve(layers[l].size());
        for (const auto& r : layers[l]) ids.push_back(r.id);
        for (std::size_t c = 0; c < kAllChannels.size(); ++c) {
            std::vector<double> values;
            values.reserve(layers[l].size());
            for (const auto& r : layers[l]) values.push_back(channel_value(r.cos, kAllChannels[c]));
            out[l][c] = box_stats(values, ids);
        }
    }
    return out;
}

MedianCurve median_curve(const ClassificationTable& table) {
    if (table.records.empty()) throw DataError("median curve of an empty classification table");
    const auto layers = by_layer(table);
    MedianCurve curve;
    curve.model = table.model;
    const std::size_t n = layers.size();
    for (std::size_t l = 0; l < n; ++l) {
        if (layers[l].empty()) throw DataError("layer " + std::to_string(l) + " has no classified neurons");
        std::vector<double> v;
        v.reserve(layers[l].size());
        for (const auto& r : layers[l]) v.push_back(r.cos.in_out);
        std::sort(v.begin(), v.end());
        const double depth = n > 1 ? static_cast<double>(l) / static_cast<double>(n - 1) : 0.0;
        curve.points.emplace_back(depth, quantile_sorted(v, 0.5));
    }
    return curve;
}

std::vector<MedianCurve> median_curves(std::span<const ClassificationTable> tables) {
    std::vector<MedianCurve> out;
    out.reserve(tables.size());
    for (const auto& t : tables) out.push_back(median_curve(t));
    return out;
}

ContingencyTable contingency(const ClassificationTable& io, const RoleTable& roles) {
    if (io.records.size() != roles.records.size()) {
        throw DataError("contingency: classification covers " + std::to_string(io.records.size()) +
                        " neurons but roles cover " + std::to_string(roles.records.size()));
    }
    ContingencyTable t;
    for (std::size_t k = 0; k < io.records.size(); ++k) {
        const auto& c = io.records[k];
        const auto& r = roles.records[k];
        if (c.id != r.id) {
            throw DataError("contingency: neuron universes differ at " + c.id.str() + " vs " + r.id.str());
        }
        const std::size_t row = c.label.index();
        const auto col = static_cast<std::size_t>(r.role);
        ++t.counts[row][col];
        ++t.row_totals[row];
        ++t.column_totals[col];
        ++t.total;
    }
    return t;
}

Report build_report(const ClassificationTable& table, const RoleTable* roles) {
    Report rep;
    rep.model = table.model;
    rep.tau = table.tau;
    rep.degenerate = table.degenerate.size();
    const auto counts = class_distribution(table);
    const auto boxes = layer_boxstats(table);
    rep.n_layers = counts.size();
    for (std::size_t l = 0; l < counts.size(); ++l) rep.layers.push_back({l, counts[l], boxes[l]});
    rep.medians = median_curve(table);
    if (roles) rep.contingency = contingency(table, *roles);
    return rep;
}

namespace {

nlohmann::json box_json(const BoxStats& b) {
    nlohmann::json outliers = nlohmann::json::array();
    for (const auto& [id, v] : b.outliers) outliers.push_back({{"neuron", id.str()}, {"value", v}});
    return {{"count", b.count},       {"min", b.min},
            {"max", b.max},           {"median", b.median},
            {"q1", b.q1},             {"q3", b.q3},
            {"whisker_low", b.whisker_low}, {"whisker_high", b.whisker_high},
            {"outliers", outliers}};
}

BoxStats box_from_json(const nlohmann::json& j) {
    BoxStats b;
    b.count = j.at("count").get<std::size_t>();
    b.min = j.at("min").get<double>();
    b.max = j.at("max").get<double>();
    b.median = j.at("median").get<double>();
    b.q1 = j.at("q1").get<double>();
    b.q3 = j.at("q3").get<double>();
    b.whisker_low = j.at("whisker_low").get<double>();
    b.whisker_high = j.at("whisker_high").get<double>();
    for (const auto& o : j.at("outliers")) {
        b.outliers.emplace_back(NeuronId::parse(o.at("neuron").get<std::string>()), o.at("value").get<double>());
    }
    return b;
}

}  // namespace

nlohmann::json to_json(const Report& report) {
    nlohmann::json layers = nlohmann::json::array();
    for (const auto& L : report.layers) {
        nlohmann::json counts = nlohmann::json::object();
        for (const auto& label : all_labels()) counts[label.str()] = L.counts[label.index()];
        nlohmann::json box = nlohmann::json::object();
        for (std::size_t c = 0; c < kAllChannels.size(); ++c) box[std::string(to_string(kAllChannels[c]))] = box_json(L.box[c]);
        layers.push_back({{"layer", L.layer}, {"counts", counts}, {"box", box}});
    }
    nlohmann::json medians = nlohmann::json::array();
    for (std::size_t l = 0; l < report.medians.points.size(); ++l) {
        medians.push_back({{"layer", l},
                           {"depth", report.medians.points[l].first},
                           {"median_cos_in_out", report.medians.points[l].second}});
    }
    nlohmann::json j = {{"model", report.model},
                        {"tau", report.tau},
                        {"n_layers", report.n_layers},
                        {"degenerate", report.degenerate},
                        {"depth_normalization", "layer / (n_layers - 1)"},
                        {"layers", layers},
                        {"medians", medians}};
    if (report.contingency) {
        const auto& t = *report.contingency;
        nlohmann::json roles = nlohmann::json::array();
        for (auto r : kAllRoles) roles.push_back(to_string(r));
        nlohmann::json rows = nlohmann::json::array();
        for (const auto& label : all_labels()) {
            rows.push_back({{"label", label.str()},
                            {"counts", t.counts[label.index()]},
                            {"total", t.row_totals[label.index()]}});
        }
        j["contingency"] = {{"roles", roles}, {"rows", rows}, {"column_totals", t.column_totals}, {"total", t.total}};
    }
    return j;
}

Report report_from_json(const nlohmann::json& j) {
    try {
        Report rep;
        rep.model = j.at("model").get<std::string>();
        rep.tau = j.at("tau").get<double>();
        rep.n_layers = j.at("n_layers").get<std::size_t>();
        rep.degenerate = j.value("degenerate", std::size_t{0});
        for (const auto& L : j.at("layers")) {
            LayerSummary s;
            s.layer = L.at("layer").get<std::size_t>();
            for (const auto& label : all_labels()) s.counts[label.index()] = L.at("counts").at(label.str()).get<std::size_t>();
            for (std::size_t c = 0; c < kAllChannels.size(); ++c) {
                s.box[c] = box_from_json(L.at("box").at(std::string(to_string(kAllChannels[c]))));
            }
            rep.layers.push_back(std::move(s));
        }
        rep.medians.model = rep.model;
        for (const auto& m : j.at("medians")) {
            rep.medians.points.emplace_back(m.at("depth").get<double>(), m.at("median_cos_in_out").get<double>());
        }
        if (j.contains("contingency")) {
            const auto& c = j.at("contingency");
            ContingencyTable t;
            for (const auto& row : c.at("rows")) {
                const auto idx = parse_io_label(row.at("label").get<std::string>()).index();
                t.counts[idx] = row.at("counts").get<std::array<std::size_t, kRoleCount>>();
                t.row_totals[idx] = row.at("total").get<std::size_t>();
            }
            t.column_totals = c.at("column_totals").get<std::array<std::size_t, kRoleCount>>();
            t.total = c.at("total").get<std::size_t>();
            rep.contingency = t;
        }
        return rep;
    } catch (const nlohmann::json::exception& e) {
        throw DataError(std::string("malformed report JSON: ") + e.what());
    } catch (const UsageError& e) {
        throw DataError(std::string("malformed report JSON: ") + e.what());
    }
}

}  // namespace neuron_io
