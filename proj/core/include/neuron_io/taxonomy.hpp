// Copyright (c) 2026, The neuron-io authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "neuron_io/types.hpp"
#include "neuron_io/weights.hpp"

namespace neuron_io {

inline constexpr double kDefaultTau = 0.5;

enum class IOClass {
    enrichment,
    conditional_enrichment,
    depletion,
    conditional_depletion,
    proportional_change,
    orthogonal_output,
};

inline constexpr std::array<IOClass, 6> kAllClasses = {
    IOClass::enrichment,          IOClass::conditional_enrichment, IOClass::depletion,
    IOClass::conditional_depletion, IOClass::proportional_change,  IOClass::orthogonal_output,
};

[[nodiscard]] std::string_view to_string(IOClass c);
[[nodiscard]] IOClass parse_io_class(std::string_view name);

struct IOLabel {
    IOClass base = IOClass::orthogonal_output;
    bool atypical = false;

    // "atypical_conditional_depletion" style identifier.
    [[nodiscard]] std::string str() const;
    // Dense index in [0, 11), ordered as kAllLabels.
    [[nodiscard]] std::size_t index() const;

    friend bool operator==(const IOLabel&, const IOLabel&) = default;
};

inline constexpr std::size_t kLabelCount = 11;
// The eleven valid labels; orthogonal output has no atypical variant.
[[nodiscard]] const std::array<IOLabel, kLabelCount>& all_labels();
[[nodiscard]] IOLabel parse_io_label(std::string_view name);

// Throws UsageError unless 0 < tau < 1. A magnitude equal to tau counts as "~0".
[[nodiscard]] IOLabel classify(const CosineTriple& t, double tau = kDefaultTau);

[[nodiscard]] constexpr bool is_input_manipulator(const IOLabel& label) noexcept {
    return label.base != IOClass::orthogonal_output;
}

struct ClassifiedNeuron {
    NeuronId id;
    CosineTriple cos;
    IOLabel label;
};

struct ClassificationTable {
    std::string model;
    double tau = kDefaultTau;
    std::size_t n_layers = 0;
    std::size_t d_mlp = 0;
    std::vector<ClassifiedNeuron> records;  // sorted by (layer, index)
    std::vector<NeuronId> degenerate;       // zero-norm neurons, excluded from records

    [[nodiscard]] const ClassifiedNeuron* find(NeuronId id) const;
};

[[nodiscard]] ClassificationTable classify_model(const ModelWeights& model, double tau = kDefaultTau);

// CSV: layer,index,cos_gate_in,cos_gate_out,cos_in_out,base_class,atypical (6 decimals).
void write_classification_csv(std::ostream& os, const ClassificationTable& table);
// Reads the CSV back; model/tau are not part of the format and are left for the caller.
[[nodiscard]] ClassificationTable read_classification_csv(std::istream& is, double tau = kDefaultTau);
[[nodiscard]] ClassificationTable read_classification_csv(const std::filesystem::path& path,
                                                          double tau = kDefaultTau);

}  // namespace neuron_io
