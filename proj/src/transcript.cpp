#include "ct2bc/transcript.hpp"

#include "ct2bc/errors.hpp"

#include <algorithm>
#include <climits>
#include <string>

namespace ct2bc::session {
namespace {

void put_u64(std::vector<std::uint8_t>& out, std::uint64_t v) {
    for (int shift = 56; shift >= 0; shift -= 8) {
        out.push_back(static_cast<std::uint8_t>(v >> shift));
    }
}

void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
    for (int shift = 24; shift >= 0; shift -= 8) {
        out.push_back(static_cast<std::uint8_t>(v >> shift));
    }
}

class Cursor {
public:
    explicit Cursor(std::span<const std::uint8_t> bytes) : bytes_(bytes) {}

    std::span<const std::uint8_t> take(std::size_t n) {
        if (bytes_.size() - pos_ < n) {
            throw FrameError("transcript truncated");
        }
        auto out = bytes_.subspan(pos_, n);
        pos_ += n;
        return out;
    }
    std::uint8_t u8() { return take(1)[0]; }
    std::uint64_t be(std::size_t width) {
        std::uint64_t v = 0;
        for (std::uint8_t b : take(width)) {
            v = (v << 8) | b;
        }
        return v;
    }
    bool done() const { return pos_ == bytes_.size(); }

private:
    std::span<const std::uint8_t> bytes_;
    std::size_t pos_ = 0;
};

} // namespace

std::string_view to_string(Role role) noexcept {
    return role == Role::committer ? "committer" : "verifier";
}

Role parse_role(std::string_view text) {
    if (text == "a" || text == "A" || text == "committer") {
        return Role::committer;
    }
    if (text == "b" || text == "B" || text == "verifier") {
        return Role::verifier;
    }
    throw ParameterError("unknown role '" + std::string(text) + "' (expected a|b)");
}

std::vector<std::uint8_t> Transcript::serialize() const {
    std::vector<std::uint8_t> out(kTranscriptMagic.begin(), kTranscriptMagic.end());
    out.push_back(kTranscriptVersion);
    out.push_back(static_cast<std::uint8_t>(header.role));
    out.push_back(header.committed_bit ? static_cast<std::uint8_t>(to_uint(*header.committed_bit)) : 0xFF);
    out.push_back(header.test_seed ? 1 : 0);
    put_u64(out, header.test_seed.value_or(0));
    put_u64(out, static_cast<std::uint64_t>(header.inbound_latency.num()));
    put_u64(out, static_cast<std::uint64_t>(header.inbound_latency.den()));
    const auto params = wire::to_wire(header.params).body;
    put_u32(out, static_cast<std::uint32_t>(params.size()));
    out.insert(out.end(), params.begin(), params.end());
    for (const TranscriptEntry& e : entries) {
        out.push_back(static_cast<std::uint8_t>(e.direction));
        put_u64(out, e.logical_time);
        put_u32(out, static_cast<std::uint32_t>(e.frame.size()));
        out.insert(out.end(), e.frame.begin(), e.frame.end());
    }
    return out;
}

Transcript Transcript::parse(std::span<const std::uint8_t> bytes) {
    Cursor in(bytes);
    const auto magic = in.take(kTranscriptMagic.size());
    if (!std::equal(magic.begin(), magic.end(), kTranscriptMagic.begin())) {
        throw FrameError("not a transcript (bad magic)");
    }
    if (in.u8() != kTranscriptVersion) {
        throw FrameError("unsupported transcript version");
    }
    Transcript t;
    const auto role = in.u8();
    if (role > 1) {
        throw FrameError("bad role in transcript");
    }
    t.header.role = static_cast<Role>(role);
    const auto bit = in.u8();
    if (bit == 0 || bit == 1) {
        t.header.committed_bit = bit_from(bit);
    } else if (bit != 0xFF) {
        throw FrameError("bad committed bit in transcript");
    }
    const auto test_mode = in.u8();
    const auto seed = in.be(8);
    if (test_mode > 1 || (test_mode == 0 && seed != 0)) {
        throw FrameError("bad test mode in transcript");
    }
    if (test_mode == 1) {
        t.header.test_seed = seed;
    }
    const auto num = static_cast<std::int64_t>(in.be(8));
    const auto den = in.be(8);
    if (den == 0 || den > static_cast<std::uint64_t>(INT64_MAX)) {
        throw FrameError("bad latency in transcript");
    }
    t.header.inbound_latency = Rational(num, static_cast<std::int64_t>(den));
    if (t.header.inbound_latency.num() != num || t.header.inbound_latency.den() != static_cast<std::int64_t>(den)) {
        throw FrameError("latency not in lowest terms");
    }
    const auto params_len = in.be(4);
    if (params_len > wire::kMaxBodySize) {
        throw FrameError("params record too large");
    }
    const auto body = in.take(params_len);
    const auto params = wire::from_wire(wire::WireMessage{wire::MessageType::params, {body.begin(), body.end()}});
    t.header.params = std::get<wire::ParamsMsg>(params);

    while (!in.done()) {
        TranscriptEntry e;
        const auto dir = in.u8();
        if (dir > 1) {
            throw FrameError("bad entry direction in transcript");
        }
        e.direction = static_cast<Direction>(dir);
        e.logical_time = in.be(8);
        // Received frames are stored as they came in, malformed or not.
        const auto size = in.be(4);
        if (size > wire::kHeaderSize + wire::kMaxBodySize) {
            throw FrameError("transcript entry too large");
        }
        const auto frame = in.take(size);
        e.frame.assign(frame.begin(), frame.end());
        t.entries.push_back(std::move(e));
    }
    return t;
}

} // namespace ct2bc::session
