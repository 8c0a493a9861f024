#pragma once

#include "ct2bc/bit.hpp"

#include <array>
#include <cstdint>
#include <span>

namespace ct2bc {

class Rng;

using Digest = std::array<std::uint8_t, 32>;
using Salt = std::array<std::uint8_t, 32>;

Digest sha256(std::span<const std::uint8_t> data);

Salt random_salt(Rng& rng);

// Salted SHA-256 commitment to a batch of bits, domain separated and length
// bound: H("ct2bc.toss-commit.v1" || u32 count || packed bits || salt).
Digest commit_bits(std::span<const Bit> bits, const Salt& salt);

inline Digest commit_bit(Bit bit, const Salt& salt) { return commit_bits(std::span<const Bit>(&bit, 1), salt); }

bool opening_matches(const Digest& digest, std::span<const Bit> bits, const Salt& salt);

} // namespace ct2bc
