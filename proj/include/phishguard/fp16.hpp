#pragma once

#include <bit>
#include <cmath>
#include <cstdint>

namespace phishguard {

inline constexpr float kHalfMax = 65504.0f;

/// IEEE 754 binary32 -> binary16 with round-to-nearest-even. Values beyond
/// the half range become infinity; NaN stays NaN.
inline std::uint16_t float_to_half_bits(float value) noexcept {
    const auto bits = std::bit_cast<std::uint32_t>(value);
    const std::uint32_t sign = (bits >> 16) & 0x8000u;
    const std::uint32_t exponent = (bits >> 23) & 0xffu;
    std::uint32_t mantissa = bits & 0x7fffffu;

    if (exponent == 0xffu) {
        return static_cast<std::uint16_t>(sign | 0x7c00u | (mantissa != 0 ? (0x200u | (mantissa >> 13)) : 0u));
    }
    const int half_exponent = static_cast<int>(exponent) - 127 + 15;
    if (half_exponent >= 0x1f) return static_cast<std::uint16_t>(sign | 0x7c00u);

    if (half_exponent <= 0) {
        if (half_exponent < -10) return static_cast<std::uint16_t>(sign);
        mantissa |= 0x800000u;
        const int shift = 14 - half_exponent;
        std::uint32_t half_mantissa = mantissa >> shift;
        const std::uint32_t rest = mantissa & ((1u << shift) - 1u);
        const std::uint32_t halfway = 1u << (shift - 1);
        if (rest > halfway || (rest == halfway && (half_mantissa & 1u))) ++half_mantissa;
        // a carry out of the mantissa lands on the smallest normal, which is correct
        return static_cast<std::uint16_t>(sign | half_mantissa);
    }

    std::uint32_t half = sign | (static_cast<std::uint32_t>(half_exponent) << 10) | (mantissa >> 13);
    const std::uint32_t rest = mantissa & 0x1fffu;
    if (rest > 0x1000u || (rest == 0x1000u && (half & 1u))) ++half;
    return static_cast<std::uint16_t>(half);
}

inline float half_bits_to_float(std::uint16_t half) noexcept {
    const std::uint32_t sign = static_cast<std::uint32_t>(half & 0x8000u) << 16;
    const std::uint32_t exponent = (half >> 10) & 0x1fu;
    const std::uint32_t mantissa = half & 0x3ffu;

    if (exponent == 0) {
        const float magnitude = std::ldexp(static_cast<float>(mantissa), -24);
        return sign ? -magnitude : magnitude;
    }
    if (exponent == 0x1f) return std::bit_cast<float>(sign | 0x7f800000u | (mantissa << 13));
    return std::bit_cast<float>(sign | ((exponent - 15 + 127) << 23) | (mantissa << 13));
}

/// Nearest binary16 value, widened back to float.
inline float round_to_half(float value) noexcept { return half_bits_to_float(float_to_half_bits(value)); }

} // namespace phishguard
