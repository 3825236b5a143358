// Copyright (c) 2026, The neuron-io authors
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <bit>
#include <cmath>
#include <cstring>
#include <limits>

#include "neuron_io/error.hpp"
#include "neuron_io/safetensors.hpp"
#include "support.hpp"

using namespace neuron_io;
using namespace neuron_io::safetensors;
using neuron_io::testing::TempDir;

namespace {

// Writes an 8-byte little-endian length, `header`, then `data`.
void write_raw(const std::filesystem::path& p, const std::string& header, const std::string& data) {
    std::string bytes(8, '\0');
    const std::uint64_t n = header.size();
    for (int i = 0; i < 8; ++i) bytes[i] = static_cast<char>((n >> (8 * i)) & 0xff);
    neuron_io::testing::write_file(p, bytes + header + data);
}

std::vector<std::byte> le16(std::initializer_list<std::uint16_t> values) {
    std::vector<std::byte> out;
    for (auto v : values) {
        out.push_back(static_cast<std::byte>(v & 0xff));
        out.push_back(static_cast<std::byte>(v >> 8));
    }
    return out;
}

}  // namespace

TEST_CASE("half precision decoding") {
    CHECK(half_to_float(0x3C00) == 1.0f);
    CHECK(half_to_float(0xC000) == -2.0f);
    CHECK(half_to_float(0x7BFF) == 65504.0f);
    CHECK(half_to_float(0x0001) == std::ldexp(1.0f, -24));  // smallest subnormal
    CHECK(half_to_float(0x03FF) == std::ldexp(1023.0f, -24));
    CHECK(half_to_float(0x7C00) == std::numeric_limits<float>::infinity());
    CHECK(std::isnan(half_to_float(0x7E00)));
    CHECK(std::signbit(half_to_float(0x8000)));
}

TEST_CASE("bfloat16 decoding") {
    CHECK(bfloat16_to_float(0x3F80) == 1.0f);
    CHECK(bfloat16_to_float(0xC040) == -3.0f);
    CHECK(bfloat16_to_float(0x0001) == std::bit_cast<float>(0x00010000u));
}

TEST_CASE("narrowing conversions round to nearest even") {
    // 1 + 2^-11 sits halfway between 1 and the next half; ties go to the even mantissa.
    CHECK(float_to_half(1.0f + std::ldexp(1.0f, -11)) == 0x3C00);
    CHECK(float_to_half(1.0f + 3 * std::ldexp(1.0f, -11)) == 0x3C02);
    CHECK(float_to_half(65520.0f) == 0x7C00);  // rounds past the largest finite half
    CHECK(float_to_half(std::ldexp(1.0f, -25)) == 0x0000);
    CHECK(float_to_half(std::ldexp(3.0f, -26)) == 0x0001);
    CHECK(float_to_bfloat16(std::bit_cast<float>(0x3F808000u)) == 0x3F80);
    CHECK(float_to_bfloat16(std::bit_cast<float>(0x3F818000u)) == 0x3F82);
    CHECK(float_to_bfloat16(std::bit_cast<float>(0x3F808001u)) == 0x3F81);
}

TEST_CASE("every finite half survives a round trip through float") {
    for (std::uint32_t bits = 0; bits < 0x10000; ++bits) {
        const auto h = static_cast<std::uint16_t>(bits);
        if ((h & 0x7C00) == 0x7C00) continue;
        REQUIRE(float_to_half(half_to_float(h)) == h);
    }
}

TEST_CASE("dtype names") {
    CHECK(parse_dtype("BF16") == DType::BF16);
    CHECK(to_string(DType::F16) == "F16");
    CHECK(element_size(DType::F32) == 4);
    CHECK_THROWS_AS((void)parse_dtype("I64"), DataError);
}

TEST_CASE("writer and reader agree") {
    TempDir tmp;
    const auto path = tmp / "t.safetensors";
    Writer w;
    const std::vector<float> a = {1.0f, -2.5f, 3.25f, 0.0f, 1e-20f, 7.0f};
    w.add_f32("b.matrix", {2, 3}, a);
    w.add_raw("a.half", DType::F16, {2}, le16({0x3C00, 0xC000}));
    w.add_raw("c.bf16", DType::BF16, {1}, le16({0x3F80}));
    w.set_metadata("format", "pt");
    w.write(path);

    File f(path);
    CHECK(f.tensors().size() == 3);
    CHECK(f.metadata().at("format") == "pt");
    CHECK(f.info("b.matrix").shape == std::vector<std::size_t>{2, 3});
    CHECK(f.read_f32("b.matrix") == a);
    CHECK(f.read_f32("a.half") == std::vector<float>{1.0f, -2.0f});
    CHECK(f.read_f32("c.bf16") == std::vector<float>{1.0f});
    CHECK_THROWS_AS((void)f.read_f32("missing"), DataError);
}

TEST_CASE("writer output is byte-identical regardless of insertion order") {
    TempDir tmp;
    const std::vector<float> x = {1, 2, 3};
    const std::vector<float> y = {4, 5};
    Writer w1;
    w1.add_f32("x", {3}, x);
    w1.add_f32("y", {2}, y);
    Writer w2;
    w2.add_f32("y", {2}, y);
    w2.add_f32("x", {3}, x);
    w1.write(tmp / "1.safetensors");
    w2.write(tmp / "2.safetensors");
    CHECK(neuron_io::testing::read_file(tmp / "1.safetensors") == neuron_io::testing::read_file(tmp / "2.safetensors"));
}

TEST_CASE("malformed files are rejected") {
    TempDir tmp;
    const auto p = tmp / "bad.safetensors";

    SUBCASE("too short") {
        neuron_io::testing::write_file(p, "abc");
        CHECK_THROWS_AS(File{p}, DataError);
    }
    SUBCASE("header length beyond the file") {
        write_raw(p, "{}", "");
        std::string bytes = neuron_io::testing::read_file(p);
        bytes[0] = static_cast<char>(0xff);
        neuron_io::testing::write_file(p, bytes);
        CHECK_THROWS_AS(File{p}, DataError);
    }
    SUBCASE("header is not JSON") {
        write_raw(p, "{nope", "");
        CHECK_THROWS_AS(File{p}, DataError);
    }
    SUBCASE("offsets out of range") {
        write_raw(p, R"({"t":{"dtype":"F32","shape":[2],"data_offsets":[0,8]}})", std::string(4, '\0'));
        CHECK_THROWS_AS(File{p}, DataError);
    }
    SUBCASE("size does not match the shape") {
        write_raw(p, R"({"t":{"dtype":"F32","shape":[3],"data_offsets":[0,8]}})", std::string(8, '\0'));
        CHECK_THROWS_AS(File{p}, DataError);
    }
    SUBCASE("unsupported dtype") {
        write_raw(p, R"({"t":{"dtype":"I64","shape":[1],"data_offsets":[0,8]}})", std::string(8, '\0'));
        CHECK_THROWS_AS(File{p}, DataError);
    }
}

TEST_CASE("metadata entry and hand-written file") {
    TempDir tmp;
    const auto p = tmp / "h.safetensors";
    std::string data(8, '\0');
    const float v[2] = {0.5f, -4.0f};
    std::memcpy(data.data(), v, 8);
    write_raw(p, R"({"__metadata__":{"k":"v"},"w":{"dtype":"F32","shape":[1,2],"data_offsets":[0,8]}})", data);
    File f(p);
    CHECK(f.contains("w"));
    CHECK_FALSE(f.contains("__metadata__"));
    CHECK(f.metadata().at("k") == "v");
    CHECK(f.read_f32("w") == std::vector<float>{0.5f, -4.0f});
}
