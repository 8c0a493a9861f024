#pragma once

#include "ct2bc/bit.hpp"
#include "ct2bc/coin_toss.hpp"
#include "ct2bc/rational.hpp"
#include "ct2bc/scheme.hpp"
#include "ct2bc/verdict.hpp"

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <variant>
#include <vector>

namespace ct2bc::wire {

enum class MessageType : std::uint8_t {
    params = 0x01,
    toss_a = 0x02,
    toss_b = 0x03,
    toss_commit = 0x04,
    toss_open = 0x05,
    commitment = 0x10,
    unveil = 0x11,
    verdict = 0x20,
    abort = 0x7F,
};

std::string_view to_string(MessageType type) noexcept;
bool is_known_type(std::uint8_t tag) noexcept;

inline constexpr std::size_t kHeaderSize = 5;
// Frames announcing a larger body are rejected without reading it.
inline constexpr std::uint32_t kMaxBodySize = 1u << 20;

/// type_tag (1 byte) | length (u32 big-endian) | body.
struct WireMessage {
    MessageType type = MessageType::abort;
    std::vector<std::uint8_t> body;
    friend bool operator==(const WireMessage&, const WireMessage&) = default;
};

std::vector<std::uint8_t> encode(const WireMessage& msg);

/// Exactly one frame. Throws FrameError on unknown tag, short buffer, length
/// mismatch or trailing bytes.
WireMessage decode(std::span<const std::uint8_t> bytes);

/// Size of the frame at the front of `bytes` once its header is available.
std::optional<std::size_t> frame_size(std::span<const std::uint8_t> bytes);

// ---------------------------------------------------------------------------
// Typed bodies. All integers big-endian, bitmaps MSB-first and zero padded.
// Decoding is strict: anything that would not re-encode to the same bytes is
// rejected, so encode/decode is a bijection on valid messages.
// ---------------------------------------------------------------------------

enum class AbortCode : std::uint8_t {
    out_of_phase = 1,
    malformed = 2,
    late_arrival = 3,
    commitment_open_failure = 4,
    counterparty_silent = 5,
    params_mismatch = 6,
    retry_exhausted = 7,
};

std::string_view to_string(AbortCode code) noexcept;

// scheme u8 | m u16 | n u16 | engine u8 | seed u64 | policy u8 | retry_limit u32 | epsilon f64 bits
struct ParamsMsg {
    SchemeParams scheme;
    EngineSpec engine;
    TossSecurityParams toss;
    friend bool operator==(const ParamsMsg&, const ParamsMsg&) = default;
};

// round u32 | count u32 | send_time (i64 num, u64 den) | send_position (i64, u64) | packed bits
// count == 0 marks a voided round (the sender saw the counterparty's message arrive late).
struct TossContributionMsg {
    bool from_committer = true; // TOSS_A when true, TOSS_B otherwise
    std::uint32_t round = 0;
    Rational send_time;
    Rational send_position;
    std::vector<Bit> bits;
    friend bool operator==(const TossContributionMsg&, const TossContributionMsg&) = default;
};

// round u32 | count u32 | digest[32]
struct TossCommitMsg {
    std::uint32_t round = 0;
    std::uint32_t count = 0;
    Digest digest{};
    friend bool operator==(const TossCommitMsg&, const TossCommitMsg&) = default;
};

// round u32 | count u32 | salt[32] | packed bits
struct TossOpenMsg {
    std::uint32_t round = 0;
    Salt salt{};
    std::vector<Bit> bits;
    friend bool operator==(const TossOpenMsg&, const TossOpenMsg&) = default;
};

// scheme u8 | payload
//   subgraph:   n u16 | edge bitmap over n(n-1)/2 pairs
//   subset-sum: len u8 | minimal big-endian value (len >= 1, no leading zero byte)
struct CommitmentMsg {
    Commitment commitment;
    friend bool operator==(const CommitmentMsg&, const CommitmentMsg&) = default;
};

// claimed u8 | commitment payload as above | witness
//   subgraph:   count u16 | count x u16 vertex index
//   subset-sum: m u16 | bitmap of m selection bits
struct UnveilMsg {
    Commitment commitment;
    Opening opening;
    friend bool operator==(const UnveilMsg&, const UnveilMsg&) = default;
};

// accepted u8 | (bit if accepted, reject reason otherwise)
struct VerdictMsg {
    Verdict verdict;
    friend bool operator==(const VerdictMsg&, const VerdictMsg&) = default;
};

// code u8
struct AbortMsg {
    AbortCode code = AbortCode::malformed;
    friend bool operator==(const AbortMsg&, const AbortMsg&) = default;
};

using Message = std::variant<ParamsMsg, TossContributionMsg, TossCommitMsg, TossOpenMsg, CommitmentMsg, UnveilMsg,
                             VerdictMsg, AbortMsg>;

WireMessage to_wire(const Message& msg);

/// Throws FrameError on a body that is truncated, over-long, or not canonical.
Message from_wire(const WireMessage& msg);

std::vector<std::uint8_t> encode_commitment_payload(const Commitment& commitment);

// Canonical instance encodings, used by tools that publish instances.
//   graph:    m u16 | edge bitmap over m(m-1)/2 pairs
//   knapsack: m u16 | m fields of m bits each, MSB first, packed contiguously
std::vector<std::uint8_t> encode_graph(const GraphInstance& c);
GraphInstance decode_graph(std::span<const std::uint8_t> bytes);
std::vector<std::uint8_t> encode_knapsack(const KnapsackInstance& c);
KnapsackInstance decode_knapsack(std::span<const std::uint8_t> bytes);

} // namespace ct2bc::wire
