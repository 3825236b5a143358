// Copyright (c) 2026, The neuron-io authors
// SPDX-License-Identifier: Apache-2.0

#include "neuron_io/safetensors.hpp"

#include <array>
#include <bit>
#include <cstring>
#include <fstream>
#include <limits>

#include <nlohmann/json.hpp>

#include "neuron_io/error.hpp"

namespace neuron_io::safetensors {

static_assert(std::endian::native == std::endian::little, "safetensors payloads are read in place as little-endian");

namespace {

// Guards against reading an absurd header from a corrupt or non-safetensors file.
constexpr std::uint64_t kMaxHeaderBytes = 100ull << 20;

std::uint16_t load_u16(const std::byte* p) {
    std::uint16_t v;
    std::memcpy(&v, p, sizeof v);
    return v;
}

}  // namespace

std::string_view to_string(DType dtype) {
    switch (dtype) {
        case DType::F32: return "F32";
        case DType::F16: return "F16";
        case DType::BF16: return "BF16";
    }
    return "?";
}

DType parse_dtype(std::string_view name) {
    if (name == "F32") return DType::F32;
    if (name == "F16") return DType::F16;
    if (name == "BF16") return DType::BF16;
    throw DataError("unsupported safetensors dtype '" + std::string(name) + "' (supported: F32, F16, BF16)");
}

std::size_t element_size(DType dtype) {
    return dtype == DType::F32 ? 4 : 2;
}

std::size_t TensorInfo::numel() const {
    std::size_t n = 1;
    for (auto d : shape) n *= d;
    return n;
}

File::File(std::filesystem::path path) : path_(std::move(path)) {
    std::ifstream in(path_, std::ios::binary);
    if (!in) throw DataError("cannot open safetensors file '" + path_.string() + "'");

    std::array<unsigned char, 8> len_bytes{};
    in.read(reinterpret_cast<char*>(len_bytes.data()), len_bytes.size());
    if (!in) throw DataError("'" + path_.string() + "' is too short to be a safetensors file");
    std::uint64_t header_len = 0;
    for (int i = 7; i >= 0; --i) header_len = (header_len << 8) | len_bytes[static_cast<std::size_t>(i)];

    const auto file_size = std::filesystem::file_size(path_);
    if (header_len > kMaxHeaderBytes || 8 + header_len > file_size) {
        throw DataError("'" + path_.string() + "' has an invalid header length " + std::to_string(header_len));
    }
    std::string header(header_len, '\0');
    in.read(header.data(), static_cast<std::streamsize>(header_len));
    if (!in) throw DataError("truncated safetensors header in '" + path_.string() + "'");

    data_start_ = 8 + header_len;
    data_size_ = file_size - data_start_;

    nlohmann::json j;
    try {
        j = nlohmann::json::parse(header);
    } catch (const nlohmann::json::parse_error& e) {
        throw DataError("malformed safetensors header in '" + path_.string() + "': " + e.what());
    }
    if (!j.is_object()) throw DataError("safetensors header of '" + path_.string() + "' is not a JSON object");

    for (const auto& [name, entry] : j.items()) {
        if (name == "__metadata__") {
            for (const auto& [k, v] : entry.items()) {
                if (v.is_string()) metadata_[k] = v.get<std::string>();
            }
            continue;
        }
        try {
            TensorInfo info;
            info.name = name;
            info.dtype = parse_dtype(entry.at("dtype").get<std::string>());
            info.shape = entry.at("shape").get<std::vector<std::size_t>>();
            const auto offsets = entry.at("data_offsets").get<std::vector<std::uint64_t>>();
            if (offsets.size() != 2 || offsets[0] > offsets[1] || offsets[1] > data_size_) {
                throw DataError("tensor '" + name + "' has out-of-range data_offsets");
            }
            info.begin = offsets[0];
            info.end = offsets[1];
            if (info.numel() * element_size(info.dtype) != info.end - info.begin) {
                throw DataError("tensor '" + name + "' byte size does not match its shape and dtype");
            }
            tensors_.emplace(name, std::move(info));
        } catch (const nlohmann::json::exception& e) {
            throw DataError("bad header entry for tensor '" + name + "' in '" + path_.string() + "': " + e.what());
        }
    }
}

const TensorInfo& File::info(const std::string& name) const {
    auto it = tensors_.find(name);
    if (it == tensors_.end()) throw DataError("tensor '" + name + "' not found in '" + path_.string() + "'");
    return it->second;
}

std::vector<float> File::read_f32(const std::string& name) const {
    const auto& ti = info(name);
    std::ifstream in(path_, std::ios::binary);
    in.seekg(static_cast<std::streamoff>(data_start_ + ti.begin));
    std::vector<std::byte> raw(ti.end - ti.begin);
    in.read(reinterpret_cast<char*>(raw.data()), static_cast<std::streamsize>(raw.size()));
    if (!in) throw DataError("failed to read tensor '" + name + "' from '" + path_.string() + "'");

    const std::size_t n = ti.numel();
    std::vector<float> out(n);
    switch (ti.dtype) {
        case DType::F32:
            std::memcpy(out.data(), raw.data(), n * sizeof(float));
            break;
        case DType::F16:
            for (std::size_t i = 0; i < n; ++i) out[i] = half_to_float(load_u16(raw.data() + 2 * i));
            break;
        case DType::BF16:
            for (std::size_t i = 0; i < n; ++i) out[i] = bfloat16_to_float(load_u16(raw.data() + 2 * i));
            break;
    }
    return out;
}

void Writer::add_f32(std::string name, std::vector<std::size_t> shape, std::span<const float> values) {
    std::vector<std::byte> bytes(values.size_bytes());
    std::memcpy(bytes.data(), values.data(), bytes.size());
    add_raw(std::move(name), DType::F32, std::move(shape), std::move(bytes));
}

void Writer::add_raw(std::string name, DType dtype, std::vector<std::size_t> shape, std::vector<std::byte> bytes) {
    std::size_t n = 1;
    for (auto d : shape) n *= d;
    if (n * element_size(dtype) != bytes.size()) {
        throw UsageError("tensor '" + name + "' payload size does not match its shape");
    }
    entries_[std::move(name)] = Entry{dtype, std::move(shape), std::move(bytes)};
}

void Writer::set_metadata(std::string key, std::string value) {
    metadata_[std::move(key)] = std::move(value);
}

void Writer::write(const std::filesystem::path& path) const {
    nlohmann::json header = nlohmann::json::object();
    if (!metadata_.empty()) header["__metadata__"] = metadata_;
    std::uint64_t offset = 0;
    for (const auto& [name, e] : entries_) {
        header[name] = {{"dtype", to_string(e.dtype)},
                        {"shape", e.shape},
                        {"data_offsets", {offset, offset + e.bytes.size()}}};
        offset += e.bytes.size();
    }
    std::string text = header.dump();
    // Pad with spaces so the data section is 8-byte aligned.
    while ((text.size() + 8) % 8 != 0) text.push_back(' ');

    std::ofstream os(path, std::ios::binary | std::ios::trunc);
    if (!os) throw DataError("cannot write '" + path.string() + "'");
    std::uint64_t len = text.size();
    std::array<char, 8> len_bytes{};
    for (std::size_t i = 0; i < 8; ++i) len_bytes[i] = static_cast<char>((len >> (8 * i)) & 0xffu);
    os.write(len_bytes.data(), len_bytes.size());
    os.write(text.data(), static_cast<std::streamsize>(text.size()));
    for (const auto& [name, e] : entries_) {
        os.write(reinterpret_cast<const char*>(e.bytes.data()), static_cast<std::streamsize>(e.bytes.size()));
    }
    if (!os) throw DataError("failed writing '" + path.string() + "'");
}

}  // namespace neuron_io::safetensors
