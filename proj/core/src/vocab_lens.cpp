// Copyright (c) 2026, The neuron-io authors
// SPDX-License-Identifier: Apache-2.0

#include "neuron_io/vocab_lens.hpp"

#include <algorithm>
#include <numeric>

#include "neuron_io/error.hpp"
#include "neuron_io/geometry.hpp"
#include "neuron_io/parallel.hpp"

namespace neuron_io {

std::string_view to_string(Direction d) { return d == Direction::positive ? "positive" : "negative"; }
std::string_view to_string(Basis b) { return b == Basis::unembed ? "unembed" : "embed"; }

Direction parse_direction(std::string_view s) {
    if (s == "positive" || s == "pos") return Direction::positive;
    if (s == "negative" || s == "neg") return Direction::negative;
    throw UsageError("unknown direction '" + std::string(s) + "' (expected positive or negative)");
}

Basis parse_basis(std::string_view s) {
    if (s == "unembed") return Basis::unembed;
    if (s == "embed") return Basis::embed;
    throw UsageError("unknown basis '" + std::string(s) + "' (expected unembed or embed)");
}

TokenRanking top_tokens(std::span<const float> w, const ModelWeights& model, const Vocabulary& vocab, std::size_t k,
                        Direction direction, Basis basis) {
    const Matrix* m = basis == Basis::unembed ? model.unembed.get() : model.embed.get();
    if (!m) throw DataError(std::string("basis '") + std::string(to_string(basis)) + "' is not loaded for this model");
    if (vocab.size() != m->rows()) {
        throw DataError("vocab/" + std::string(to_string(basis)) + " mismatch: vocabulary has " +
                        std::to_string(vocab.size()) + " tokens, matrix has " + std::to_string(m->rows()));
    }
    if (k == 0 || k > m->rows()) {
        throw UsageError("k must lie in [1, d_vocab = " + std::to_string(m->rows()) + "], got " + std::to_string(k));
    }
    if (w.size() != m->cols()) {
        throw UsageError("vector has dimension " + std::to_string(w.size()) + ", basis has " + std::to_string(m->cols()));
    }
    const double wn = squared_norm(w);
    if (!(wn > 0.0)) throw NumericalError("cannot project a zero-norm vector to vocabulary space");

    std::vector<double> cos(m->rows());
    parallel_for(m->rows(), [&](std::size_t begin, std::size_t end) {
        for (std::size_t j = begin; j < end; ++j) {
            const auto row = m->row(j);
            const double rn = squared_norm(row);
            cos[j] = rn > 0.0 ? cosine_from_parts(dot(w, row), wn, rn) : 0.0;
        }
    }, 1024);

    std::vector<std::size_t> order(cos.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    const bool pos = direction == Direction::positive;
    std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(k), order.end(),
                      [&](std::size_t a, std::size_t b) {
                          if (cos[a] != cos[b]) return pos ? cos[a] > cos[b] : cos[a] < cos[b];
                          return a < b;
                      });
    TokenRanking out;
    out.direction = direction;
    out.basis = basis;
    out.entries.reserve(k);
    for (std::size_t r = 0; r < k; ++r) out.entries.push_back({vocab.tokens[order[r]], order[r], cos[order[r]]});
    return out;
}

nlohmann::json to_json(const TokenRanking& ranking, std::string_view neuron, std::string_view vector) {
    nlohmann::json entries = nlohmann::json::array();
    for (const auto& e : ranking.entries) entries.push_back({{"token", e.token}, {"id", e.id}, {"cos", e.cos}});
    return {{"neuron", neuron},
            {"vector", vector},
            {"direction", to_string(ranking.direction)},
            {"basis", to_string(ranking.basis)},
            {"entries", entries}};
}

}  // namespace neuron_io
