// Copyright (c) 2026, The neuron-io authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "neuron_io/matrix.hpp"
#include "neuron_io/types.hpp"

namespace neuron_io {

/// MLP weights of one layer. Every matrix is d_mlp x d_model with one row per
/// neuron; the down projection is transposed at load time so w_out is a row too.
struct LayerWeights {
    Matrix gate;
    Matrix in;
    Matrix out;
};

struct ModelMeta {
    std::string name;
    std::string preset;
    std::size_t n_layers = 0;
    std::size_t d_model = 0;
    std::size_t d_mlp = 0;
    std::size_t d_vocab = 0;  // 0 when neither embedding matrix is loaded
    Activation activation = Activation::swish;
};

// (layer, head) -> BOS key vector of length d_head.
using BosKeys = std::map<std::pair<std::size_t, std::size_t>, std::vector<float>>;

/// Read-only weight store. Safe for concurrent readers once constructed.
///
/// `unembed` holds W_U with one row per vocabulary entry (i.e. W_U transposed,
/// d_vocab x d_model), matching the orientation of `embed`. For tied models
/// both pointers alias the same matrix.
struct ModelWeights {
    ModelMeta meta;
    std::vector<LayerWeights> layers;
    std::shared_ptr<const Matrix> unembed;
    std::shared_ptr<const Matrix> embed;
    // Per layer: the full query projection, (n_heads * d_head) x d_model. Empty when absent.
    std::vector<Matrix> attn_query;
    BosKeys bos_keys;

    [[nodiscard]] bool has_attention() const noexcept { return !attn_query.empty() && !bos_keys.empty(); }

    // Checks shapes, finiteness and metadata consistency; throws DataError.
    void validate() const;
    // Recomputes meta dimensions from the stored tensors.
    void refresh_meta();
};

/// Where a logical tensor lives on disk. `name` may contain "{layer}".
/// `transpose` is set when the on-disk tensor carries its per-row entity
/// (neuron or token) along the second axis.
struct TensorSource {
    std::string name;
    bool transpose = false;
};

struct Preset {
    std::string name;
    TensorSource gate;
    TensorSource in;
    TensorSource out;
    std::optional<TensorSource> unembed;
    std::optional<TensorSource> embed;
    std::optional<TensorSource> query;
    std::optional<TensorSource> norm;  // post-attention norm gain, used only when folding
    Activation activation = Activation::swish;
    bool tie_embeddings = false;       // alias unembed to embed when the unembed tensor is absent
    bool norm_gain_offset = false;     // stored gain is (g - 1), as in Gemma
};

[[nodiscard]] std::vector<std::string> builtin_preset_names();
[[nodiscard]] Preset builtin_preset(const std::string& name);
// Parses a mapping file (see README "Preset mapping file").
[[nodiscard]] Preset preset_from_json_file(const std::filesystem::path& path);
// Resolves "generic" against `mapping_file`, otherwise a built-in preset.
[[nodiscard]] Preset resolve_preset(const std::string& name, const std::optional<std::filesystem::path>& mapping_file);

struct LoadOptions {
    std::string model_name;                           // defaults to the directory name
    bool fold_norm_gains = false;                     // multiply reading weights by the MLP input norm gain
    std::optional<std::filesystem::path> bos_keys;    // k_BOS sidecar
    bool load_attention = true;
};

[[nodiscard]] ModelWeights load_model(const std::filesystem::path& dir, const Preset& preset,
                                      const LoadOptions& options = {});

// Writes `model` as one `model.safetensors` file in `dir` using the preset's
// names and orientations, so load_model(dir, preset) reproduces it bit for bit.
void save_model(const std::filesystem::path& dir, const ModelWeights& model, const Preset& preset);

[[nodiscard]] BosKeys load_bos_keys(const std::filesystem::path& path);

struct Vocabulary {
    std::vector<std::string> tokens;

    [[nodiscard]] std::size_t size() const noexcept { return tokens.size(); }
};

// JSON array of strings, or newline-delimited UTF-8 tokens.
[[nodiscard]] Vocabulary load_vocab(const std::filesystem::path& path);

// Throws DataError("vocab/unembed mismatch") when the unembedding is loaded and
// its size differs. Without an unembedding a mismatch against the embedding
// is returned as a warning instead.
[[nodiscard]] std::vector<std::string> check_vocab(const ModelWeights& model, const Vocabulary& vocab);

[[nodiscard]] WeightTriple neuron_triple(const ModelWeights& model, NeuronId id);

}  // namespace neuron_io
