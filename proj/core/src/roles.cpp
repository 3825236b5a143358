// Copyright (c) 2026, The neuron-io authors
// SPDX-License-Identifier: Apache-2.0

#include "neuron_io/roles.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <ostream>
#include <sstream>

#include <Eigen/Dense>
#include <fmt/format.h>

#include "neuron_io/error.hpp"
#include "neuron_io/geometry.hpp"
#include "neuron_io/parallel.hpp"

namespace neuron_io {

std::string_view to_string(Role role) {
    switch (role) {
        case Role::prediction: return "prediction";
        case Role::suppression: return "suppression";
        case Role::partition: return "partition";
        case Role::entropy: return "entropy";
        case Role::attention_deactivation: return "attention_deactivation";
        case Role::attention_activation: return "attention_activation";
        case Role::other: return "other";
    }
    return "?";
}

Role parse_role(std::string_view name) {
    for (auto r : kAllRoles) {
        if (to_string(r) == name) return r;
    }
    throw DataError("unknown role '" + std::string(name) + "'");
}

VocabProfile vocab_profile(std::span<const float> w_out, const Matrix& unembed) {
    if (w_out.size() != unembed.cols()) {
        throw UsageError("w_out has dimension " + std::to_string(w_out.size()) + ", unembedding has " +
                         std::to_string(unembed.cols()));
    }
    const double wn = squared_norm(w_out);
    if (!(wn > 0.0)) throw NumericalError("vocabulary profile of a zero-norm w_out");
    VocabProfile p;
    p.values.resize(unembed.rows());
    for (std::size_t j = 0; j < unembed.rows(); ++j) {
        const auto col = unembed.row(j);
        const double cn = squared_norm(col);
        if (cn == 0.0) {
            p.values[j] = 0.0;
            p.zero_columns.push_back(j);
            continue;
        }
        p.values[j] = cosine_from_parts(dot(w_out, col), wn, cn);
    }
    return p;
}

Moments moments(std::span<const double> values) {
    const std::size_t n = values.size();
    if (n < 2) throw UsageError("moments need at least two values");
    const auto [lo, hi] = std::minmax_element(values.begin(), values.end());
    Moments m;
    if (*lo == *hi) return m;  // constant: variance 0, higher moments undefined

    double sum = 0.0;
    for (double v : values) sum += v;
    const double mean = sum / static_cast<double>(n);
    double m2 = 0.0, m3 = 0.0, m4 = 0.0;
    for (double v : values) {
        const double dv = v - mean;
        const double d2 = dv * dv;
        m2 += d2;
        m3 += d2 * dv;
        m4 += d2 * d2;
    }
    const double inv_n = 1.0 / static_cast<double>(n);
    m2 *= inv_n;
    m3 *= inv_n;
    m4 *= inv_n;
    m.variance = m2;
    if (m2 > 0.0) {
        m.skew = m3 / (m2 * std::sqrt(m2));
        m.excess_kurtosis = m4 / (m2 * m2) - 3.0;
    }
    return m;
}

double partition_cutoff(std::span<const Moments> all, std::size_t n) {
    if (n == 0) throw UsageError("partition size n must be at least 1");
    if (n > all.size()) {
        throw UsageError("partition size " + std::to_string(n) + " exceeds the neuron count " + std::to_string(all.size()));
    }
    std::vector<double> v(all.size());
    std::transform(all.begin(), all.end(), v.begin(), [](const Moments& m) { return m.variance; });
    std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(n - 1), v.end(), std::greater<>());
    return v[n - 1];
}

double kurtosis_cutoff(std::span<const Moments> all, const std::vector<bool>& in_partition) {
    if (all.size() != in_partition.size()) throw UsageError("kurtosis_cutoff: partition mask has the wrong length");
    double cutoff = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < all.size(); ++i) {
        if (in_partition[i] && all[i].excess_kurtosis) cutoff = std::max(cutoff, *all[i].excess_kurtosis);
    }
    return cutoff;
}

Role prediction_or_suppression(double cos_gate_in, std::optional<double> skew) {
    if (!skew) throw UsageError("prediction/suppression needs a defined skew");
    return cos_gate_in * *skew < 0.0 ? Role::suppression : Role::prediction;
}

std::vector<double> query_bos_direction(const Matrix& query, std::size_t head, std::span<const float> k_bos) {
    const std::size_t dh = k_bos.size();
    if (dh == 0 || (head + 1) * dh > query.rows()) {
        throw DataError("head " + std::to_string(head) + " with d_head " + std::to_string(dh) +
                        " exceeds the query projection (" + std::to_string(query.rows()) + " rows)");
    }
    std::vector<double> dir(query.cols(), 0.0);
    for (std::size_t r = 0; r < dh; ++r) {
        const auto row = query.row(head * dh + r);
        const double k = k_bos[r];
        for (std::size_t c = 0; c < dir.size(); ++c) dir[c] += k * static_cast<double>(row[c]);
    }
    return dir;
}

double attention_score(std::span<const float> w_out, const Matrix& query, std::size_t head,
                       std::span<const float> k_bos) {
    const auto dir = query_bos_direction(query, head, k_bos);
    return cosine(w_out, std::span<const double>(dir));
}

std::optional<Role> attention_role(double score, double cos_gate_in, double cutoff) {
    if (std::abs(score) < cutoff) return std::nullopt;
    const double adjusted = cos_gate_in < 0.0 ? -score : score;
    return adjusted > 0.0 ? Role::attention_deactivation : Role::attention_activation;
}

std::array<std::size_t, kRoleCount> RoleTable::totals() const {
    std::array<std::size_t, kRoleCount> t{};
    for (const auto& r : records) ++t[static_cast<std::size_t>(r.role)];
    return t;
}

namespace {

using RowMatrixF = Eigen::Matrix<float, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

// Unit-normalised rows; zero rows stay zero.
RowMatrixF normalized_rows(const Matrix& m) {
    RowMatrixF out(static_cast<Eigen::Index>(m.rows()), static_cast<Eigen::Index>(m.cols()));
    for (std::size_t r = 0; r < m.rows(); ++r) {
        const auto row = m.row(r);
        const double n2 = squared_norm(row);
        const double inv = n2 > 0.0 ? 1.0 / std::sqrt(n2) : 0.0;
        for (std::size_t c = 0; c < m.cols(); ++c) {
            out(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = static_cast<float>(row[c] * inv);
        }
    }
    return out;
}

struct HeadDirection {
    std::size_t layer;
    std::vector<double> dir;
};

}  // namespace

RoleTable assign_roles(const ModelWeights& model, const ClassificationTable& io, const RoleParams& params) {
    if (!model.unembed) throw DataError("functional roles need the unembedding matrix (W_U), which is not loaded");
    RoleTable table;
    table.model = model.meta.name;
    table.params = params;
    const std::size_t n = io.records.size();
    table.records.resize(n);
    for (std::size_t k = 0; k < n; ++k) {
        const auto id = io.records[k].id;
        if (id.layer >= model.layers.size() || id.index >= model.layers[id.layer].out.rows()) {
            throw DataError("classification table refers to neuron " + id.str() + " which the model does not have");
        }
        table.records[k].id = id;
    }
    if (n == 0) return table;

    // Phase 1: vocabulary-profile moments, GEMM over blocks of neurons.
    const RowMatrixF vocab = normalized_rows(*model.unembed);
    constexpr std::size_t kBlock = 64;
    const std::size_t d = model.meta.d_model;
    parallel_for(
        (n + kBlock - 1) / kBlock,
        [&](std::size_t b0, std::size_t b1) {
            RowMatrixF w(static_cast<Eigen::Index>(kBlock), static_cast<Eigen::Index>(d));
            std::vector<double> profile(vocab.rows());
            for (std::size_t b = b0; b < b1; ++b) {
                const std::size_t start = b * kBlock;
                const std::size_t count = std::min(kBlock, n - start);
                w.setZero();
                for (std::size_t k = 0; k < count; ++k) {
                    const auto id = io.records[start + k].id;
                    const auto row = model.layers[id.layer].out.row(id.index);
                    const double inv = 1.0 / std::sqrt(squared_norm(row));
                    for (std::size_t c = 0; c < d; ++c) {
                        w(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(c)) = static_cast<float>(row[c] * inv);
                    }
                }
                const RowMatrixF cos = w.topRows(static_cast<Eigen::Index>(count)) * vocab.transpose();
                for (std::size_t k = 0; k < count; ++k) {
                    for (Eigen::Index j = 0; j < cos.cols(); ++j) {
                        profile[static_cast<std::size_t>(j)] = std::clamp(static_cast<double>(cos(static_cast<Eigen::Index>(k), j)), -1.0, 1.0);
                    }
                    table.records[start + k].moments = moments(profile);
                }
            }
        },
        1);

    // Phase 2: partition by variance rank.
    std::vector<Moments> all(n);
    for (std::size_t k = 0; k < n; ++k) all[k] = table.records[k].moments;
    table.variance_cutoff = partition_cutoff(all, params.partition_n);
    std::vector<bool> partition(n, false);
    for (std::size_t k = 0; k < n; ++k) {
        if (all[k].variance > 0.0 && all[k].variance >= table.variance_cutoff) {
            partition[k] = true;
            table.records[k].role = Role::partition;
            ++table.partition_size;
        }
    }

    // Phase 3: prediction / suppression above the largest partition kurtosis.
    table.kurtosis_cutoff = kurtosis_cutoff(all, partition);
    const double kcut = table.partition_size > 0 ? table.kurtosis_cutoff : params.kurtosis_floor;
    for (std::size_t k = 0; k < n; ++k) {
        auto& rec = table.records[k];
        if (partition[k] || !rec.moments.excess_kurtosis || !(*rec.moments.excess_kurtosis > kcut)) continue;
        rec.role = prediction_or_suppression(io.records[k].cos.gate_in, rec.moments.skew);
    }

    // Phase 4: attention (de)activation against heads of later layers.
    table.attention_available = model.has_attention();
    if (table.attention_available) {
        std::vector<HeadDirection> heads;
        for (const auto& [key, k_bos] : model.bos_keys) {
            auto dir = query_bos_direction(model.attn_query[key.first], key.second, k_bos);
            if (squared_norm(std::span<const double>(dir)) > 0.0) heads.push_back({key.first, std::move(dir)});
        }
        // TODO: route through the blocked GEMM of phase 1; the pointwise f64 loop is
        // slow for full-size models with ~1000 heads.
        parallel_for(n, [&](std::size_t begin, std::size_t end) {
            for (std::size_t k = begin; k < end; ++k) {
                auto& rec = table.records[k];
                const auto w_out = model.layers[rec.id.layer].out.row(rec.id.index);
                std::optional<double> best;
                for (const auto& h : heads) {
                    if (h.layer <= rec.id.layer) continue;
                    const double s = cosine(w_out, std::span<const double>(h.dir));
                    if (!best || std::abs(s) > std::abs(*best)) best = s;
                }
                rec.max_attention_score = best;
                if (!best || rec.role != Role::other) continue;
                if (auto r = attention_role(*best, io.records[k].cos.gate_in, params.attention_cutoff)) rec.role = *r;
            }
        });
    }

    // Phase 5: entropy neurons, ranked by null-space share in the last layer.
    if (params.entropy_n > 0 && !model.layers.empty()) {
        const std::size_t last = model.layers.size() - 1;
        const UnembedSpectrum spectrum(*model.unembed);
        std::vector<std::size_t> candidates;
        for (std::size_t k = 0; k < n; ++k) {
            auto& rec = table.records[k];
            if (rec.id.layer != last) continue;
            rec.null_fraction = spectrum.null_space_fraction(model.layers[last].out.row(rec.id.index), params.null_k);
            candidates.push_back(k);
        }
        std::stable_sort(candidates.begin(), candidates.end(), [&](std::size_t a, std::size_t b) {
            return *table.records[a].null_fraction > *table.records[b].null_fraction;
        });
        for (std::size_t c = 0; c < std::min(params.entropy_n, candidates.size()); ++c) {
            auto& rec = table.records[candidates[c]];
            if (rec.role == Role::other) rec.role = Role::entropy;
        }
    }
    return table;
}

namespace {

std::string opt_num(const std::optional<double>& v) {
    return v ? fmt::format("{:.9g}", *v) : std::string();
}

std::optional<double> parse_opt(const std::string& s) {
    if (s.empty()) return std::nullopt;
    return std::stod(s);
}

}  // namespace

void write_roles_csv(std::ostream& os, const RoleTable& table) {
    os << "layer,index,role,variance,skew,excess_kurtosis,null_fraction,max_attention_score\n";
    for (const auto& r : table.records) {
        os << fmt::format("{},{},{},{:.9g},{},{},{},{}\n", r.id.layer, r.id.index, to_string(r.role), r.moments.variance,
                          opt_num(r.moments.skew), opt_num(r.moments.excess_kurtosis), opt_num(r.null_fraction),
                          opt_num(r.max_attention_score));
    }
}

RoleTable read_roles_csv(std::istream& is) {
    RoleTable table;
    std::string line;
    if (!std::getline(is, line)) throw DataError("empty roles CSV");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != "layer,index,role,variance,skew,excess_kurtosis,null_fraction,max_attention_score") {
        throw DataError("unexpected roles CSV header: '" + line + "'");
    }
    std::size_t line_no = 1;
    while (std::getline(is, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        std::vector<std::string> f;
        std::string field;
        std::istringstream ss(line);
        while (std::getline(ss, field, ',')) f.push_back(field);
        while (f.size() < 8) f.emplace_back();
        if (f.size() != 8) throw DataError("roles CSV line " + std::to_string(line_no) + " has too many fields");
        try {
            RoleRecord r;
            r.id = {std::stoul(f[0]), std::stoul(f[1])};
            r.role = parse_role(f[2]);
            r.moments.variance = std::stod(f[3]);
            r.moments.skew = parse_opt(f[4]);
            r.moments.excess_kurtosis = parse_opt(f[5]);
            r.null_fraction = parse_opt(f[6]);
            r.max_attention_score = parse_opt(f[7]);
            table.records.push_back(r);
        } catch (const DataError& e) {
            throw DataError("roles CSV line " + std::to_string(line_no) + ": " + e.what());
        } catch (const std::logic_error&) {
            throw DataError("roles CSV line " + std::to_string(line_no) + " has a malformed number");
        }
    }
    std::sort(table.records.begin(), table.records.end(),
              [](const RoleRecord& a, const RoleRecord& b) { return a.id < b.id; });
    return table;
}

RoleTable read_roles_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open roles CSV '" + path.string() + "'");
    auto t = read_roles_csv(in);
    t.model = path.stem().string();
    return t;
}

}  // namespace neuron_io
