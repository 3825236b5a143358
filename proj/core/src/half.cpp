// Copyright (c) 2026, The neuron-io authors
// SPDX-License-Identifier: Apache-2.0

#include <bit>
#include <cstdint>

#include "neuron_io/safetensors.hpp"

namespace neuron_io::safetensors {

float half_to_float(std::uint16_t h) {
    const std::uint32_t sign = static_cast<std::uint32_t>(h & 0x8000u) << 16;
    std::uint32_t exponent = (h >> 10) & 0x1fu;
    std::uint32_t mantissa = h & 0x3ffu;
    std::uint32_t bits;
    if (exponent == 0) {
        if (mantissa == 0) {
            bits = sign;
        } else {
            // subnormal: renormalise
            exponent = 127 - 15 + 1;
            while ((mantissa & 0x400u) == 0) {
                mantissa <<= 1;
                --exponent;
            }
            mantissa &= 0x3ffu;
            bits = sign | (exponent << 23) | (mantissa << 13);
        }
    } else if (exponent == 0x1f) {
        bits = sign | 0x7f800000u | (mantissa << 13);
    } else {
        bits = sign | ((exponent + 127 - 15) << 23) | (mantissa << 13);
    }
    return std::bit_cast<float>(bits);
}

float bfloat16_to_float(std::uint16_t b) {
    return std::bit_cast<float>(static_cast<std::uint32_t>(b) << 16);
}

std::uint16_t float_to_bfloat16(float value) {
    const std::uint32_t bits = std::bit_cast<std::uint32_t>(value);
    if ((bits & 0x7fffffffu) > 0x7f800000u) return static_cast<std::uint16_t>((bits >> 16) | 0x40u);  // quiet NaN
    const std::uint32_t rounding = 0x7fffu + ((bits >> 16) & 1u);
    return static_cast<std::uint16_t>((bits + rounding) >> 16);
}

std::uint16_t float_to_half(float value) {
    const std::uint32_t bits = std::bit_cast<std::uint32_t>(value);
    const std::uint16_t sign = static_cast<std::uint16_t>((bits >> 16) & 0x8000u);
    const std::uint32_t abs = bits & 0x7fffffffu;

    if (abs > 0x7f800000u) return sign | 0x7e00u;  // NaN
    if (abs >= 0x477ff000u) return sign | 0x7c00u;  // overflows to infinity after rounding

    const int exponent = static_cast<int>(abs >> 23) - 127;
    if (exponent < -25) return sign;  // rounds to zero

    std::uint32_t mantissa = (abs & 0x7fffffu) | 0x800000u;
    int shift;
    std::uint32_t half_exponent;
    if (exponent < -14) {
        shift = -1 - exponent;  // subnormal result: 13 + (-14 - exponent)
        half_exponent = 0;
    } else {
        shift = 13;
        half_exponent = static_cast<std::uint32_t>(exponent + 15);
        mantissa &= 0x7fffffu;
    }
    const std::uint32_t halfway = 1u << (shift - 1);
    const std::uint32_t remainder = mantissa & ((1u << shift) - 1);
    std::uint32_t result = (half_exponent << 10) + (mantissa >> shift);
    if (remainder > halfway || (remainder == halfway && (result & 1u))) ++result;  // carries into the exponent
    return static_cast<std::uint16_t>(sign | result);
}

}  // namespace neuron_io::safetensors
