// Copyright (c) 2026, The neuron-io authors
// SPDX-License-Identifier: Apache-2.0

#include <fstream>

#include <nlohmann/json.hpp>

#include "neuron_io/error.hpp"
#include "neuron_io/weights.hpp"

namespace neuron_io {

namespace {

Preset hf_decoder(std::string name) {
    Preset p;
    p.name = std::move(name);
    p.gate = {"model.layers.{layer}.mlp.gate_proj.weight", false};
    p.in = {"model.layers.{layer}.mlp.up_proj.weight", false};
    // down_proj is d_model x d_mlp on disk
    p.out = {"model.layers.{layer}.mlp.down_proj.weight", true};
    p.unembed = TensorSource{"lm_head.weight", false};
    p.embed = TensorSource{"model.embed_tokens.weight", false};
    p.query = TensorSource{"model.layers.{layer}.self_attn.q_proj.weight", false};
    p.norm = TensorSource{"model.layers.{layer}.post_attention_layernorm.weight", false};
    p.tie_embeddings = true;
    return p;
}

TensorSource source_from_json(const nlohmann::json& j, const std::string& key) {
    if (j.is_string()) return {j.get<std::string>(), false};
    if (j.is_object()) {
        TensorSource s;
        s.name = j.at("name").get<std::string>();
        s.transpose = j.value("transpose", false);
        return s;
    }
    throw DataError("preset entry '" + key + "' must be a string or {name, transpose}");
}

}  // namespace

std::vector<std::string> builtin_preset_names() {
    return {"llama", "olmo", "gemma", "qwen"};
}

Preset builtin_preset(const std::string& name) {
    if (name == "llama" || name == "qwen") return hf_decoder(name);
    if (name == "olmo") {
        // OLMo uses non-parametric layer norm and an untied output head.
        Preset p = hf_decoder(name);
        p.norm.reset();
        p.tie_embeddings = false;
        return p;
    }
    if (name == "gemma") {
        Preset p = hf_decoder(name);
        p.activation = Activation::gelu;
        p.unembed.reset();
        p.norm = TensorSource{"model.layers.{layer}.pre_feedforward_layernorm.weight", false};
        p.norm_gain_offset = true;
        return p;
    }
    std::string known;
    for (const auto& n : builtin_preset_names()) known += " " + n;
    throw UsageError("unknown preset '" + name + "' (built-in:" + known + "; or 'generic' with a mapping file)");
}

Preset preset_from_json_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open preset mapping file '" + path.string() + "'");
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
        throw DataError("malformed preset mapping file '" + path.string() + "': " + e.what());
    }
    try {
        Preset p;
        p.name = j.value("name", std::string("generic"));
        p.activation = parse_activation(j.value("activation", std::string("swish")));
        p.tie_embeddings = j.value("tie_embeddings", false);
        p.norm_gain_offset = j.value("norm_gain_offset", false);
        const auto& t = j.at("tensors");
        for (const char* required : {"gate", "in", "out"}) {
            if (!t.contains(required)) {
                throw DataError(std::string("preset mapping file lacks required tensor '") + required + "'");
            }
        }
        p.gate = source_from_json(t.at("gate"), "gate");
        p.in = source_from_json(t.at("in"), "in");
        p.out = source_from_json(t.at("out"), "out");
        if (t.contains("unembed")) p.unembed = source_from_json(t.at("unembed"), "unembed");
        if (t.contains("embed")) p.embed = source_from_json(t.at("embed"), "embed");
        if (t.contains("query")) p.query = source_from_json(t.at("query"), "query");
        if (t.contains("norm")) p.norm = source_from_json(t.at("norm"), "norm");
        return p;
    } catch (const nlohmann::json::exception& e) {
        throw DataError("invalid preset mapping file '" + path.string() + "': " + e.what());
    }
}

Preset resolve_preset(const std::string& name, const std::optional<std::filesystem::path>& mapping_file) {
    if (name == "generic") {
        if (!mapping_file) throw UsageError("preset 'generic' requires a mapping file");
        return preset_from_json_file(*mapping_file);
    }
    return builtin_preset(name);
}

}  // namespace neuron_io
