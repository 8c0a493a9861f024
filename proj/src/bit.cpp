#include "ct2bc/bit.hpp"

namespace ct2bc {

std::vector<Bit> bits_from_string(std::string_view text) {
    std::vector<Bit> out;
    out.reserve(text.size());
    for (char ch : text) {
        switch (ch) {
        case '0': out.push_back(Bit::zero); break;
        case '1': out.push_back(Bit::one); break;
        case ' ':
        case '|':
        case '_': break; // separators allowed in fixtures
        default: throw ParameterError(std::string("not a bit: '") + ch + "'");
        }
    }
    return out;
}

std::string bits_to_string(std::span<const Bit> bits) {
    std::string out;
    out.reserve(bits.size());
    for (Bit b : bits) {
        out.push_back(b == Bit::one ? '1' : '0');
    }
    return out;
}

std::vector<std::uint8_t> pack_bits(std::span<const Bit> bits) {
    std::vector<std::uint8_t> out((bits.size() + 7) / 8, 0);
    for (std::size_t i = 0; i < bits.size(); ++i) {
        if (bits[i] == Bit::one) {
            out[i / 8] |= static_cast<std::uint8_t>(0x80u >> (i % 8));
        }
    }
    return out;
}

std::vector<Bit> unpack_bits(std::span<const std::uint8_t> bytes, std::size_t count) {
    if (bytes.size() != (count + 7) / 8) {
        throw FrameError("bitmap length does not match bit count");
    }
    std::vector<Bit> out(count);
    for (std::size_t i = 0; i < count; ++i) {
        out[i] = static_cast<Bit>((bytes[i / 8] >> (7 - i % 8)) & 1u);
    }
    if (count % 8 != 0) {
        const auto pad_mask = static_cast<std::uint8_t>(0xFFu >> (count % 8));
        if ((bytes.back() & pad_mask) != 0) {
            throw FrameError("nonzero padding bits in bitmap");
        }
    }
    return out;
}

} // namespace ct2bc
