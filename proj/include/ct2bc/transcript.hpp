#pragma once

#include "ct2bc/bit.hpp"
#include "ct2bc/rational.hpp"
#include "ct2bc/wire.hpp"

#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

namespace ct2bc::session {

enum class Role : std::uint8_t { committer = 0, verifier = 1 };

std::string_view to_string(Role role) noexcept;
Role parse_role(std::string_view text); // "a" | "committer" | "b" | "verifier"

enum class Direction : std::uint8_t { sent = 0, received = 1 };

struct TranscriptHeader {
    Role role = Role::committer;
    // Committer only; the verifier's transcript stores 0xFF.
    std::optional<Bit> committed_bit;
    // Seed the party's randomness was derived from, when deterministic.
    std::optional<std::uint64_t> test_seed;
    Rational inbound_latency{0};
    wire::ParamsMsg params;

    friend bool operator==(const TranscriptHeader&, const TranscriptHeader&) = default;
};

struct TranscriptEntry {
    Direction direction = Direction::sent;
    std::uint64_t logical_time = 0;
    // Raw frame bytes; received frames are kept even when they did not decode.
    std::vector<std::uint8_t> frame;

    friend bool operator==(const TranscriptEntry&, const TranscriptEntry&) = default;
};

inline constexpr std::string_view kTranscriptMagic{"CT2BC\0", 6};
inline constexpr std::uint8_t kTranscriptVersion = 1;

/// File layout:
///   "CT2BC\0" | version u8 | role u8 | committed bit u8 (0xFF: none)
///   | test mode u8 | seed u64 | latency (i64 num, u64 den)
///   | u32 length | PARAMS body
///   then per entry: direction u8 | logical time u64 | u32 length | frame verbatim
struct Transcript {
    TranscriptHeader header;
    std::vector<TranscriptEntry> entries;

    std::vector<std::uint8_t> serialize() const;
    // Throws FrameError on anything malformed.
    static Transcript parse(std::span<const std::uint8_t> bytes);

    friend bool operator==(const Transcript&, const Transcript&) = default;
};

} // namespace ct2bc::session
