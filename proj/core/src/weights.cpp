// Copyright (c) 2026, The neuron-io authors
// SPDX-License-Identifier: Apache-2.0

#include "neuron_io/weights.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <regex>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "neuron_io/error.hpp"
#include "neuron_io/safetensors.hpp"

namespace neuron_io {

namespace {

std::string expand(const std::string& name_template, std::size_t layer) {
    std::string out = name_template;
    const std::string key = "{layer}";
    for (auto pos = out.find(key); pos != std::string::npos; pos = out.find(key, pos)) {
        out.replace(pos, key.size(), std::to_string(layer));
    }
    return out;
}

std::regex template_regex(const std::string& name_template) {
    static const std::regex special(R"([.^$|()\[\]{}*+?\\])");
    const std::string key = "{layer}";
    std::string pattern;
    std::size_t start = 0;
    for (auto pos = name_template.find(key); pos != std::string::npos; pos = name_template.find(key, start)) {
        pattern += std::regex_replace(name_template.substr(start, pos - start), special, R"(\$&)");
        pattern += "([0-9]+)";
        start = pos + key.size();
    }
    pattern += std::regex_replace(name_template.substr(start), special, R"(\$&)");
    return std::regex(pattern);
}

/// All safetensors files of a directory, indexed by tensor name.
class TensorIndex {
public:
    explicit TensorIndex(const std::filesystem::path& dir) {
        if (!std::filesystem::is_directory(dir)) {
            throw DataError("model directory '" + dir.string() + "' does not exist");
        }
        std::vector<std::filesystem::path> paths;
        for (const auto& e : std::filesystem::directory_iterator(dir)) {
            if (e.is_regular_file() && e.path().extension() == ".safetensors") paths.push_back(e.path());
        }
        std::sort(paths.begin(), paths.end());
        if (paths.empty()) throw DataError("no .safetensors files in '" + dir.string() + "'");
        for (auto& p : paths) {
            files_.emplace_back(p);
            const std::size_t fi = files_.size() - 1;
            for (const auto& [name, info] : files_.back().tensors()) {
                if (!where_.emplace(name, fi).second) {
                    throw DataError("tensor '" + name + "' appears in more than one file under '" + dir.string() + "'");
                }
            }
        }
    }

    [[nodiscard]] bool contains(const std::string& name) const { return where_.contains(name); }

    [[nodiscard]] std::vector<std::string> names() const {
        std::vector<std::string> out;
        out.reserve(where_.size());
        for (const auto& [n, _] : where_) out.push_back(n);
        return out;
    }

    [[nodiscard]] const safetensors::TensorInfo& info(const std::string& name) const {
        return files_[where_.at(name)].info(name);
    }

    // Loads a 2-D tensor with the per-row entity along the first axis.
    [[nodiscard]] Matrix matrix(const std::string& name, bool transpose) const {
        const auto& ti = info(name);
        if (ti.shape.size() != 2) {
            throw DataError("tensor '" + name + "' has rank " + std::to_string(ti.shape.size()) + ", expected 2");
        }
        Matrix m(ti.shape[0], ti.shape[1], files_[where_.at(name)].read_f32(name));
        return transpose ? m.transposed() : m;
    }

    [[nodiscard]] std::vector<float> vector(const std::string& name) const {
        const auto& ti = info(name);
        if (ti.shape.size() != 1) {
            throw DataError("tensor '" + name + "' has rank " + std::to_string(ti.shape.size()) + ", expected 1");
        }
        return files_[where_.at(name)].read_f32(name);
    }

private:
    std::vector<safetensors::File> files_;
    std::map<std::string, std::size_t> where_;
};

void check_finite(const Matrix& m, const std::string& what) {
    const auto data = m.data();
    for (std::size_t i = 0; i < data.size(); ++i) {
        if (!std::isfinite(data[i])) {
            throw DataError(what + " contains a non-finite value at row " + std::to_string(i / m.cols()) +
                            ", column " + std::to_string(i % m.cols()));
        }
    }
}

std::string shape_str(const Matrix& m) {
    return std::to_string(m.rows()) + "x" + std::to_string(m.cols());
}

}  // namespace

void ModelWeights::refresh_meta() {
    meta.n_layers = layers.size();
    meta.d_mlp = layers.empty() ? 0 : layers.front().gate.rows();
    meta.d_model = layers.empty() ? 0 : layers.front().gate.cols();
    if (unembed) {
        meta.d_vocab = unembed->rows();
        if (layers.empty()) meta.d_model = unembed->cols();
    } else if (embed) {
        meta.d_vocab = embed->rows();
        if (layers.empty()) meta.d_model = embed->cols();
    } else {
        meta.d_vocab = 0;
    }
}

void ModelWeights::validate() const {
    if (meta.n_layers != layers.size()) throw DataError("meta.n_layers does not match the number of layers");
    for (std::size_t l = 0; l < layers.size(); ++l) {
        const auto& L = layers[l];
        const std::pair<const Matrix*, const char*> parts[] = {{&L.gate, "gate"}, {&L.in, "in"}, {&L.out, "out"}};
        for (const auto& [m, part] : parts) {
            const std::string what = "layer " + std::to_string(l) + " " + part;
            if (m->rows() != meta.d_mlp || m->cols() != meta.d_model) {
                throw DataError("shape mismatch: " + what + " is " + shape_str(*m) + ", expected " +
                                std::to_string(meta.d_mlp) + "x" + std::to_string(meta.d_model) + " (d_mlp x d_model)");
            }
            check_finite(*m, what);
        }
    }
    const std::pair<const Matrix*, const char*> vocab_mats[] = {{unembed.get(), "unembed"}, {embed.get(), "embed"}};
    for (const auto& [m, what] : vocab_mats) {
        if (!m) continue;
        if (m->cols() != meta.d_model) {
            throw DataError(std::string("shape mismatch: ") + what + " has width " + std::to_string(m->cols()) +
                            ", expected d_model = " + std::to_string(meta.d_model));
        }
        if (m->rows() != meta.d_vocab) {
            throw DataError(std::string("shape mismatch: ") + what + " has " + std::to_string(m->rows()) +
                            " tokens, expected d_vocab = " + std::to_string(meta.d_vocab));
        }
        const bool already_checked = m == embed.get() && embed == unembed;  // tied
        if (!already_checked) check_finite(*m, what);
    }
    if (!attn_query.empty()) {
        if (attn_query.size() != layers.size()) throw DataError("attention query data does not cover every layer");
        for (std::size_t l = 0; l < attn_query.size(); ++l) {
            if (attn_query[l].cols() != meta.d_model) {
                throw DataError("shape mismatch: layer " + std::to_string(l) + " query has width " +
                                std::to_string(attn_query[l].cols()) + ", expected d_model");
            }
            check_finite(attn_query[l], "layer " + std::to_string(l) + " query");
        }
    }
    std::optional<std::size_t> d_head;
    for (const auto& [key, k] : bos_keys) {
        const auto& [layer, head] = key;
        const std::string what = "BOS key " + std::to_string(layer) + "." + std::to_string(head);
        if (k.empty()) throw DataError(what + " is empty");
        if (d_head && *d_head != k.size()) throw DataError(what + " has length " + std::to_string(k.size()) +
                                                           ", other keys have " + std::to_string(*d_head));
        d_head = k.size();
        if (!std::all_of(k.begin(), k.end(), [](float v) { return std::isfinite(v); })) {
            throw DataError(what + " contains a non-finite value");
        }
        if (layer >= layers.size()) throw DataError(what + " refers to a layer beyond n_layers");
        if (!attn_query.empty() && (head + 1) * k.size() > attn_query[layer].rows()) {
            throw DataError(what + " refers to a head beyond the query projection of layer " + std::to_string(layer));
        }
    }
}

ModelWeights load_model(const std::filesystem::path& dir, const Preset& preset, const LoadOptions& options) {
    const TensorIndex index(dir);
    const auto all_names = index.names();

    // Layers present for any of the three MLP tensors.
    std::set<std::size_t> seen_layers;
    for (const auto* src : {&preset.gate, &preset.in, &preset.out}) {
        const auto re = template_regex(src->name);
        for (const auto& n : all_names) {
            std::smatch m;
            if (std::regex_match(n, m, re) && m.size() > 1) seen_layers.insert(std::stoul(m[1].str()));
        }
    }

    ModelWeights model;
    model.meta.name = options.model_name.empty() ? std::filesystem::absolute(dir).lexically_normal().filename().string()
                                                 : options.model_name;
    if (model.meta.name.empty()) model.meta.name = dir.string();
    model.meta.preset = preset.name;
    model.meta.activation = preset.activation;

    const std::size_t n_layers = seen_layers.empty() ? 0 : *seen_layers.rbegin() + 1;
    auto require = [&](const TensorSource& src, std::size_t layer, const char* part) {
        const std::string name = expand(src.name, layer);
        if (!index.contains(name)) {
            throw DataError("missing required tensor '" + name + "' (layer " + std::to_string(layer) + " " + part +
                            ") for preset '" + preset.name + "'");
        }
        auto m = index.matrix(name, src.transpose);
        check_finite(m, "tensor '" + name + "' (layer " + std::to_string(layer) + " " + part + ")");
        return m;
    };
    auto optional_matrix = [&](const TensorSource& src, const char* what) -> std::shared_ptr<const Matrix> {
        if (!index.contains(src.name)) return nullptr;
        auto m = index.matrix(src.name, src.transpose);
        check_finite(m, "tensor '" + src.name + "' (" + what + ")");
        return std::make_shared<const Matrix>(std::move(m));
    };

    for (std::size_t l = 0; l < n_layers; ++l) {
        LayerWeights lw{require(preset.gate, l, "gate"), require(preset.in, l, "in"), require(preset.out, l, "out")};
        const Matrix& ref = model.layers.empty() ? lw.gate : model.layers.front().gate;
        const std::pair<const Matrix*, const char*> parts[] = {{&lw.gate, "gate"}, {&lw.in, "in"}, {&lw.out, "out"}};
        for (const auto& [m, part] : parts) {
            if (m->rows() != ref.rows() || m->cols() != ref.cols()) {
                throw DataError("shape mismatch: layer " + std::to_string(l) + " " + part + " is " + shape_str(*m) +
                                " but layer 0 gate is " + shape_str(ref) + " (d_mlp x d_model)");
            }
        }
        if (options.fold_norm_gains) {
            if (!preset.norm) throw UsageError("preset '" + preset.name + "' has no norm gain tensor to fold");
            const std::string name = expand(preset.norm->name, l);
            if (!index.contains(name)) {
                throw DataError("missing norm gain tensor '" + name + "' (layer " + std::to_string(l) + " norm)");
            }
            auto gain = index.vector(name);
            if (gain.size() != lw.gate.cols()) throw DataError("norm gain '" + name + "' has the wrong length");
            if (preset.norm_gain_offset) {
                for (auto& g : gain) g += 1.0f;
            }
            for (Matrix* m : {&lw.gate, &lw.in}) {
                for (std::size_t r = 0; r < m->rows(); ++r) {
                    auto row = m->row(r);
                    for (std::size_t c = 0; c < row.size(); ++c) row[c] *= gain[c];
                }
            }
        }
        model.layers.push_back(std::move(lw));
    }

    if (preset.embed) model.embed = optional_matrix(*preset.embed, "embed");
    if (preset.unembed) model.unembed = optional_matrix(*preset.unembed, "unembed");
    if (!model.unembed && preset.tie_embeddings) model.unembed = model.embed;

    if (options.load_attention && preset.query && n_layers > 0) {
        bool all_present = true;
        for (std::size_t l = 0; l < n_layers && all_present; ++l) all_present = index.contains(expand(preset.query->name, l));
        if (all_present) {
            for (std::size_t l = 0; l < n_layers; ++l) {
                model.attn_query.push_back(index.matrix(expand(preset.query->name, l), preset.query->transpose));
            }
        }
    }
    if (options.bos_keys) model.bos_keys = load_bos_keys(*options.bos_keys);

    model.refresh_meta();
    model.validate();
    return model;
}

void save_model(const std::filesystem::path& dir, const ModelWeights& model, const Preset& preset) {
    std::filesystem::create_directories(dir);
    safetensors::Writer w;
    auto put = [&](const TensorSource& src, std::size_t layer, const Matrix& m) {
        const Matrix disk = src.transpose ? m.transposed() : m;
        w.add_f32(expand(src.name, layer), {disk.rows(), disk.cols()}, disk.data());
    };
    for (std::size_t l = 0; l < model.layers.size(); ++l) {
        put(preset.gate, l, model.layers[l].gate);
        put(preset.in, l, model.layers[l].in);
        put(preset.out, l, model.layers[l].out);
        if (l < model.attn_query.size() && preset.query) put(*preset.query, l, model.attn_query[l]);
    }
    if (model.embed) {
        if (!preset.embed) throw UsageError("preset '" + preset.name + "' has no embedding tensor name");
        put(*preset.embed, 0, *model.embed);
    }
    const bool aliased = model.unembed && model.unembed == model.embed && preset.tie_embeddings;
    if (model.unembed && !aliased) {
        if (preset.unembed) {
            put(*preset.unembed, 0, *model.unembed);
        } else if (preset.tie_embeddings && preset.embed && !model.embed) {
            // Tied presets store the shared matrix under the embedding name.
            put(*preset.embed, 0, *model.unembed);
        } else {
            throw UsageError("preset '" + preset.name + "' has no unembedding tensor name");
        }
    }
    w.set_metadata("format", "pt");
    w.write(dir / "model.safetensors");
}

BosKeys load_bos_keys(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open BOS key file '" + path.string() + "'");
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
        throw DataError("malformed BOS key file '" + path.string() + "': " + e.what());
    }
    if (!j.is_object()) throw DataError("BOS key file must be a JSON object {\"layer.head\": [...]}");
    BosKeys keys;
    for (const auto& [key, value] : j.items()) {
        NeuronId lh;
        try {
            lh = NeuronId::parse(key);
        } catch (const UsageError&) {
            throw DataError("BOS key file has malformed key '" + key + "' (expected LAYER.HEAD)");
        }
        try {
            keys[{lh.layer, lh.index}] = value.get<std::vector<float>>();
        } catch (const nlohmann::json::exception&) {
            throw DataError("BOS key '" + key + "' is not an array of numbers");
        }
    }
    return keys;
}

Vocabulary load_vocab(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open vocabulary file '" + path.string() + "'");
    std::stringstream buf;
    buf << in.rdbuf();
    const std::string text = buf.str();

    const auto first = std::find_if(text.begin(), text.end(), [](unsigned char c) { return !std::isspace(c); });
    if (first == text.end()) throw DataError("empty vocabulary in '" + path.string() + "'");

    Vocabulary vocab;
    if (*first == '[') {
        try {
            vocab.tokens = nlohmann::json::parse(text).get<std::vector<std::string>>();
        } catch (const nlohmann::json::exception& e) {
            throw DataError("malformed JSON vocabulary '" + path.string() + "': " + e.what());
        }
    } else {
        std::string::size_type start = 0;
        while (start < text.size()) {
            auto end = text.find('\n', start);
            if (end == std::string::npos) end = text.size();
            std::string token = text.substr(start, end - start);
            if (!token.empty() && token.back() == '\r') token.pop_back();
            vocab.tokens.push_back(std::move(token));
            start = end + 1;
        }
    }
    if (vocab.tokens.empty()) throw DataError("empty vocabulary in '" + path.string() + "'");
    return vocab;
}

std::vector<std::string> check_vocab(const ModelWeights& model, const Vocabulary& vocab) {
    if (model.unembed) {
        if (model.unembed->rows() != vocab.size()) {
            throw DataError("vocab/unembed mismatch: vocabulary has " + std::to_string(vocab.size()) +
                            " tokens, unembedding has " + std::to_string(model.unembed->rows()));
        }
        return {};
    }
    if (model.embed && model.embed->rows() != vocab.size()) {
        return {"vocabulary has " + std::to_string(vocab.size()) + " tokens but the embedding has " +
                std::to_string(model.embed->rows())};
    }
    return {};
}

WeightTriple neuron_triple(const ModelWeights& model, NeuronId id) {
    if (id.layer >= model.layers.size()) {
        throw UsageError("neuron " + id.str() + " out of bounds: model has " + std::to_string(model.layers.size()) +
                         " layers");
    }
    const auto& L = model.layers[id.layer];
    if (id.index >= L.gate.rows()) {
        throw UsageError("neuron " + id.str() + " out of bounds: d_mlp is " + std::to_string(L.gate.rows()));
    }
    return {L.gate.row(id.index), L.in.row(id.index), L.out.row(id.index)};
}

}  // namespace neuron_io
