// Copyright (c) 2026, The neuron-io authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "neuron_io/matrix.hpp"
#include "neuron_io/taxonomy.hpp"
#include "neuron_io/types.hpp"
#include "neuron_io/weights.hpp"

namespace neuron_io {

enum class Role {
    prediction,
    suppression,
    partition,
    entropy,
    attention_deactivation,
    attention_activation,
    other,
};

inline constexpr std::size_t kRoleCount = 7;
inline constexpr std::array<Role, kRoleCount> kAllRoles = {
    Role::prediction,         Role::suppression,          Role::partition, Role::entropy,
    Role::attention_deactivation, Role::attention_activation, Role::other,
};

[[nodiscard]] std::string_view to_string(Role role);
[[nodiscard]] Role parse_role(std::string_view name);

/// Cosines of w_out against every token row of the unembedding.
struct VocabProfile {
    std::vector<double> values;
    std::vector<std::size_t> zero_columns;  // tokens with a zero unembedding vector (entry set to 0)
};

// `unembed` is stored one row per token. Throws NumericalError on zero-norm w_out.
[[nodiscard]] VocabProfile vocab_profile(std::span<const float> w_out, const Matrix& unembed);

/// Population moments. Skew and kurtosis are absent when the variance is 0.
struct Moments {
    double variance = 0.0;
    std::optional<double> skew;
    std::optional<double> excess_kurtosis;
};

// Throws UsageError for fewer than two values.
[[nodiscard]] Moments moments(std::span<const double> values);
[[nodiscard]] inline Moments moments(const VocabProfile& p) { return moments(p.values); }

// n-th largest variance. Throws UsageError for n == 0 or n > size.
[[nodiscard]] double partition_cutoff(std::span<const Moments> all, std::size_t n);

// Max excess kurtosis over partition members, or -inf when there are none.
[[nodiscard]] double kurtosis_cutoff(std::span<const Moments> all, const std::vector<bool>& in_partition);

// Sign of cos(w_gate, w_in) * skew; a zero product counts as prediction.
// Throws UsageError when the skew is undefined.
[[nodiscard]] Role prediction_or_suppression(double cos_gate_in, std::optional<double> skew);

/// Model-space singular directions of W_U, ordered by descending singular value.
class UnembedSpectrum {
public:
    // Throws NumericalError when the decomposition does not converge.
    explicit UnembedSpectrum(const Matrix& unembed);

    [[nodiscard]] std::size_t d_model() const noexcept { return singular_values_.size(); }
    [[nodiscard]] const std::vector<double>& singular_values() const noexcept { return singular_values_; }
    // Column j of the left singular basis (unit norm).
    [[nodiscard]] std::vector<double> direction(std::size_t j) const;

    // ||N^T w|| / ||w|| where N spans the k directions with the smallest singular values.
    [[nodiscard]] double null_space_fraction(std::span<const float> w_out, std::size_t k) const;

private:
    std::vector<double> singular_values_;
    std::vector<double> vectors_;  // d_model x d_model, column-major: column j is direction j
};

[[nodiscard]] double null_space_fraction(std::span<const float> w_out, const Matrix& unembed, std::size_t k);

// W_Q k_BOS for one head; `query` is the layer's (n_heads * d_head) x d_model projection.
[[nodiscard]] std::vector<double> query_bos_direction(const Matrix& query, std::size_t head,
                                                      std::span<const float> k_bos);

// cos(w_out, W_Q k_BOS). Throws NumericalError when either side is zero.
[[nodiscard]] double attention_score(std::span<const float> w_out, const Matrix& query, std::size_t head,
                                     std::span<const float> k_bos);

// sqrt(2) / 2
inline constexpr double kAttentionCutoff = 0.70710678118654752440;

// Applies the sign of cos(w_gate, w_in) (zero counts as positive) and the
// |score| >= cutoff test. Positive adjusted score means more attention on BOS.
[[nodiscard]] std::optional<Role> attention_role(double score, double cos_gate_in,
                                                 double cutoff = kAttentionCutoff);

struct RoleParams {
    std::size_t partition_n = 1000;
    std::size_t null_k = 40;
    std::size_t entropy_n = 2;
    double attention_cutoff = kAttentionCutoff;
    // Kurtosis threshold used only when the partition set is empty.
    double kurtosis_floor = 0.0;
};

struct RoleRecord {
    NeuronId id;
    Role role = Role::other;
    Moments moments;
    std::optional<double> null_fraction;        // last layer only
    std::optional<double> max_attention_score;  // raw score with the largest magnitude
};

struct RoleTable {
    std::string model;
    RoleParams params;
    std::vector<RoleRecord> records;  // same order as the classification table
    double variance_cutoff = 0.0;
    double kurtosis_cutoff = -std::numeric_limits<double>::infinity();
    std::size_t partition_size = 0;
    bool attention_available = false;

    [[nodiscard]] std::array<std::size_t, kRoleCount> totals() const;
};

// Precedence: partition > prediction/suppression > attention > entropy; the rest are "other".
// Throws DataError when the model has no unembedding.
[[nodiscard]] RoleTable assign_roles(const ModelWeights& model, const ClassificationTable& io,
                                     const RoleParams& params = {});

// CSV: layer,index,role,variance,skew,excess_kurtosis,null_fraction,max_attention_score
void write_roles_csv(std::ostream& os, const RoleTable& table);
[[nodiscard]] RoleTable read_roles_csv(std::istream& is);
[[nodiscard]] RoleTable read_roles_csv(const std::filesystem::path& path);

}  // namespace neuron_io
