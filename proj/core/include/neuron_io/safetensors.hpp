// Copyright (c) 2026, The neuron-io authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace neuron_io::safetensors {

enum class DType { F32, F16, BF16 };

[[nodiscard]] std::string_view to_string(DType dtype);
[[nodiscard]] DType parse_dtype(std::string_view name);  // throws DataError on unsupported dtypes
[[nodiscard]] std::size_t element_size(DType dtype);

float half_to_float(std::uint16_t bits);
float bfloat16_to_float(std::uint16_t bits);
// Round-to-nearest-even narrowing conversions.
std::uint16_t float_to_half(float value);
std::uint16_t float_to_bfloat16(float value);

struct TensorInfo {
    std::string name;
    DType dtype = DType::F32;
    std::vector<std::size_t> shape;
    std::uint64_t begin = 0;  // offsets relative to the start of the data section
    std::uint64_t end = 0;

    [[nodiscard]] std::size_t numel() const;
};

/// One safetensors file: an 8-byte little-endian header length, a JSON header
/// and a raw little-endian data section. Only the header is parsed on open;
/// tensor data is read on demand.
class File {
public:
    explicit File(std::filesystem::path path);

    [[nodiscard]] const std::filesystem::path& path() const noexcept { return path_; }
    [[nodiscard]] const std::map<std::string, TensorInfo>& tensors() const noexcept { return tensors_; }
    [[nodiscard]] bool contains(const std::string& name) const { return tensors_.contains(name); }
    [[nodiscard]] const TensorInfo& info(const std::string& name) const;
    [[nodiscard]] const std::map<std::string, std::string>& metadata() const noexcept { return metadata_; }

    // Reads a tensor and converts it to f32 (row-major, on-disk layout).
    [[nodiscard]] std::vector<float> read_f32(const std::string& name) const;

private:
    std::filesystem::path path_;
    std::uint64_t data_start_ = 0;
    std::uint64_t data_size_ = 0;
    std::map<std::string, TensorInfo> tensors_;
    std::map<std::string, std::string> metadata_;
};

/// Accumulates tensors and writes them as a single safetensors file.
/// Tensors are laid out in name order so output bytes are deterministic.
class Writer {
public:
    void add_f32(std::string name, std::vector<std::size_t> shape, std::span<const float> values);
    // Pre-encoded little-endian payload of the given dtype.
    void add_raw(std::string name, DType dtype, std::vector<std::size_t> shape, std::vector<std::byte> bytes);
    void set_metadata(std::string key, std::string value);

    void write(const std::filesystem::path& path) const;

private:
    struct Entry {
        DType dtype;
        std::vector<std::size_t> shape;
        std::vector<std::byte> bytes;
    };
    std::map<std::string, Entry> entries_;
    std::map<std::string, std::string> metadata_;
};

}  // namespace neuron_io::safetensors
