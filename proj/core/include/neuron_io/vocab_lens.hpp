// Copyright (c) 2026, The neuron-io authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "neuron_io/weights.hpp"

namespace neuron_io {

enum class Direction { positive, negative };
enum class Basis { unembed, embed };

[[nodiscard]] std::string_view to_string(Direction d);
[[nodiscard]] std::string_view to_string(Basis b);
[[nodiscard]] Direction parse_direction(std::string_view s);
[[nodiscard]] Basis parse_basis(std::string_view s);

struct TokenEntry {
    std::string token;
    std::size_t id = 0;
    double cos = 0.0;

    friend bool operator==(const TokenEntry&, const TokenEntry&) = default;
};

/// Top-k tokens by cosine with a weight vector. Positive rankings are sorted
/// by descending cosine; negative rankings list the most negative cosines of w
/// first (ascending). Ties go to the lower vocabulary id.
struct TokenRanking {
    std::vector<TokenEntry> entries;
    Direction direction = Direction::positive;
    Basis basis = Basis::unembed;
};

// Throws DataError when the basis is not loaded or vocab size differs, UsageError
// for k == 0 or k > d_vocab, NumericalError for a zero vector.
[[nodiscard]] TokenRanking top_tokens(std::span<const float> w, const ModelWeights& model, const Vocabulary& vocab,
                                      std::size_t k, Direction direction = Direction::positive,
                                      Basis basis = Basis::unembed);

[[nodiscard]] nlohmann::json to_json(const TokenRanking& ranking, std::string_view neuron, std::string_view vector);

}  // namespace neuron_io
