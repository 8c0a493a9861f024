#pragma once

#include "ct2bc/errors.hpp"

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace ct2bc {

enum class Bit : std::uint8_t { zero = 0, one = 1 };

constexpr Bit operator^(Bit a, Bit b) noexcept {
    return static_cast<Bit>(static_cast<std::uint8_t>(a) ^ static_cast<std::uint8_t>(b));
}

constexpr unsigned to_uint(Bit b) noexcept { return static_cast<unsigned>(b); }

constexpr Bit flip(Bit b) noexcept { return b ^ Bit::one; }

inline Bit bit_from(unsigned v) {
    if (v > 1) {
        throw ParameterError("bit value must be 0 or 1, got " + std::to_string(v));
    }
    return static_cast<Bit>(v);
}

/// Joint coin-toss combiner: the outcome is the XOR of both contributions.
constexpr Bit xor_combine(Bit a, Bit b) noexcept { return a ^ b; }

// "0110" <-> bit vectors; used by fixtures, the CLI and the bindings.
std::vector<Bit> bits_from_string(std::string_view text);
std::string bits_to_string(std::span<const Bit> bits);

// MSB-first packing, zero padded to a byte boundary.
std::vector<std::uint8_t> pack_bits(std::span<const Bit> bits);
// Inverse of pack_bits; throws FrameError if the padding bits are not zero.
std::vector<Bit> unpack_bits(std::span<const std::uint8_t> bytes, std::size_t count);

} // namespace ct2bc
