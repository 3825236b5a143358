// Copyright (c) 2026, The neuron-io authors
// SPDX-License-Identifier: Apache-2.0

#include "neuron_io/taxonomy.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <ostream>
#include <sstream>

#include <fmt/format.h>

#include "neuron_io/error.hpp"
#include "neuron_io/geometry.hpp"

namespace neuron_io {

std::string_view to_string(IOClass c) {
    switch (c) {
        case IOClass::enrichment: return "enrichment";
        case IOClass::conditional_enrichment: return "conditional_enrichment";
        case IOClass::depletion: return "depletion";
        case IOClass::conditional_depletion: return "conditional_depletion";
        case IOClass::proportional_change: return "proportional_change";
        case IOClass::orthogonal_output: return "orthogonal_output";
    }
    return "?";
}

IOClass parse_io_class(std::string_view name) {
    for (auto c : kAllClasses) {
        if (to_string(c) == name) return c;
    }
    throw DataError("unknown IO class '" + std::string(name) + "'");
}

std::string IOLabel::str() const {
    return atypical ? "atypical_" + std::string(to_string(base)) : std::string(to_string(base));
}

const std::array<IOLabel, kLabelCount>& all_labels() {
    static const std::array<IOLabel, kLabelCount> labels = {{
        {IOClass::enrichment, false},
        {IOClass::enrichment, true},
        {IOClass::conditional_enrichment, false},
        {IOClass::conditional_enrichment, true},
        {IOClass::depletion, false},
        {IOClass::depletion, true},
        {IOClass::conditional_depletion, false},
        {IOClass::conditional_depletion, true},
        {IOClass::proportional_change, false},
        {IOClass::proportional_change, true},
        {IOClass::orthogonal_output, false},
    }};
    return labels;
}

std::size_t IOLabel::index() const {
    return 2 * static_cast<std::size_t>(base) + (atypical ? 1 : 0);
}

IOLabel parse_io_label(std::string_view name) {
    for (const auto& l : all_labels()) {
        if (l.str() == name) return l;
    }
    throw DataError("unknown IO label '" + std::string(name) + "'");
}

IOLabel classify(const CosineTriple& t, double tau) {
    if (!(tau > 0.0 && tau < 1.0)) throw UsageError("tau must lie in (0, 1), got " + std::to_string(tau));

    const bool out_follows_gate = std::abs(t.gate_out) > tau;
    const bool readers_aligned = std::abs(t.gate_in) > tau;

    IOLabel label;
    if (t.in_out > tau) {
        label.base = out_follows_gate ? IOClass::enrichment : IOClass::conditional_enrichment;
    } else if (t.in_out < -tau) {
        label.base = out_follows_gate ? IOClass::depletion : IOClass::conditional_depletion;
    } else {
        label.base = out_follows_gate ? IOClass::proportional_change : IOClass::orthogonal_output;
    }

    switch (label.base) {
        case IOClass::enrichment:
        case IOClass::depletion:
            label.atypical = !readers_aligned;
            break;
        case IOClass::conditional_enrichment:
        case IOClass::conditional_depletion:
        case IOClass::proportional_change:
            label.atypical = readers_aligned;
            break;
        case IOClass::orthogonal_output:
            label.atypical = false;
            break;
    }
    return label;
}

const ClassifiedNeuron* ClassificationTable::find(NeuronId id) const {
    auto it = std::lower_bound(records.begin(), records.end(), id,
                               [](const ClassifiedNeuron& r, const NeuronId& key) { return r.id < key; });
    return (it != records.end() && it->id == id) ? &*it : nullptr;
}

ClassificationTable classify_model(const ModelWeights& model, double tau) {
    if (!(tau > 0.0 && tau < 1.0)) throw UsageError("tau must lie in (0, 1), got " + std::to_string(tau));
    ClassificationTable table;
    table.model = model.meta.name;
    table.tau = tau;
    table.n_layers = model.layers.size();
    table.d_mlp = model.layers.empty() ? 0 : model.layers.front().gate.rows();
    table.records.reserve(table.n_layers * table.d_mlp);
    for (std::size_t l = 0; l < model.layers.size(); ++l) {
        const auto cos = cosine_triples(model.layers[l]);
        for (std::size_t i = 0; i < cos.size(); ++i) {
            const NeuronId id{l, i};
            if (cos[i].degenerate) {
                table.degenerate.push_back(id);
                continue;
            }
            table.records.push_back({id, cos[i].cos, classify(cos[i].cos, tau)});
        }
    }
    return table;
}

void write_classification_csv(std::ostream& os, const ClassificationTable& table) {
    os << "layer,index,cos_gate_in,cos_gate_out,cos_in_out,base_class,atypical\n";
    for (const auto& r : table.records) {
        os << fmt::format("{},{},{:.6f},{:.6f},{:.6f},{},{}\n", r.id.layer, r.id.index, r.cos.gate_in,
                          r.cos.gate_out, r.cos.in_out, to_string(r.label.base), r.label.atypical ? 1 : 0);
    }
}

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> fields;
    std::string field;
    std::istringstream ss(line);
    while (std::getline(ss, field, ',')) fields.push_back(field);
    if (!line.empty() && line.back() == ',') fields.emplace_back();
    return fields;
}

}  // namespace

ClassificationTable read_classification_csv(std::istream& is, double tau) {
    ClassificationTable table;
    table.tau = tau;
    std::string line;
    if (!std::getline(is, line)) throw DataError("empty classification CSV");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != "layer,index,cos_gate_in,cos_gate_out,cos_in_out,base_class,atypical") {
        throw DataError("unexpected classification CSV header: '" + line + "'");
    }
    std::size_t line_no = 1;
    std::size_t max_index = 0;
    while (std::getline(is, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        const auto f = split_csv_line(line);
        if (f.size() != 7) throw DataError("classification CSV line " + std::to_string(line_no) + " has " +
                                           std::to_string(f.size()) + " fields, expected 7");
        try {
            ClassifiedNeuron r;
            r.id = {std::stoul(f[0]), std::stoul(f[1])};
            r.cos = {std::stod(f[2]), std::stod(f[3]), std::stod(f[4])};
            r.label.base = parse_io_class(f[5]);
            if (f[6] != "0" && f[6] != "1") throw DataError("atypical must be 0 or 1");
            r.label.atypical = f[6] == "1";
            if (r.label.base == IOClass::orthogonal_output && r.label.atypical) {
                throw DataError("orthogonal_output has no atypical variant");
            }
            table.n_layers = std::max(table.n_layers, r.id.layer + 1);
            max_index = std::max(max_index, r.id.index);
            table.records.push_back(r);
        } catch (const DataError& e) {
            throw DataError("classification CSV line " + std::to_string(line_no) + ": " + e.what());
        } catch (const std::logic_error&) {
            throw DataError("classification CSV line " + std::to_string(line_no) + " has a malformed number");
        }
    }
    table.d_mlp = table.records.empty() ? 0 : max_index + 1;
    std::sort(table.records.begin(), table.records.end(),
              [](const ClassifiedNeuron& a, const ClassifiedNeuron& b) { return a.id < b.id; });
    for (std::size_t i = 1; i < table.records.size(); ++i) {
        if (table.records[i].id == table.records[i - 1].id) {
            throw DataError("classification CSV lists neuron " + table.records[i].id.str() + " twice");
        }
    }
    return table;
}

ClassificationTable read_classification_csv(const std::filesystem::path& path, double tau) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open classification CSV '" + path.string() + "'");
    auto table = read_classification_csv(in, tau);
    table.model = path.stem().string();
    return table;
}

}  // namespace neuron_io
