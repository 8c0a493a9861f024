#include "ct2bc/wire.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <type_traits>
#include <cstring>
#include <string>

namespace ct2bc::wire {
namespace {

class Writer {
public:
    void u8(std::uint8_t v) { out_.push_back(v); }
    void u16(std::uint32_t v) {
        if (v > 0xFFFF) {
            throw ParameterError("value " + std::to_string(v) + " does not fit the 16-bit wire field");
        }
        be(v, 2);
    }
    void u32(std::uint64_t v) {
        if (v > 0xFFFFFFFFull) {
            throw ParameterError("value does not fit the 32-bit wire field");
        }
        be(v, 4);
    }
    void u64(std::uint64_t v) { be(v, 8); }
    void i64(std::int64_t v) { be(static_cast<std::uint64_t>(v), 8); }
    void bytes(std::span<const std::uint8_t> b) { out_.insert(out_.end(), b.begin(), b.end()); }
    void rational(const Rational& r) {
        i64(r.num());
        u64(static_cast<std::uint64_t>(r.den()));
    }
    void bits(std::span<const Bit> b) { bytes(pack_bits(b)); }

    std::vector<std::uint8_t> take() { return std::move(out_); }

private:
    void be(std::uint64_t v, int width) {
        for (int i = width - 1; i >= 0; --i) {
            out_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
        }
    }

    std::vector<std::uint8_t> out_;
};

class Reader {
public:
    explicit Reader(std::span<const std::uint8_t> data) : data_(data) {}

    std::uint8_t u8() { return static_cast<std::uint8_t>(be(1)); }
    std::uint32_t u16() { return static_cast<std::uint32_t>(be(2)); }
    std::uint32_t u32() { return static_cast<std::uint32_t>(be(4)); }
    std::uint64_t u64() { return be(8); }
    std::int64_t i64() { return static_cast<std::int64_t>(be(8)); }

    std::span<const std::uint8_t> bytes(std::size_t n) {
        need(n);
        auto out = data_.subspan(pos_, n);
        pos_ += n;
        return out;
    }

    template <std::size_t N>
    std::array<std::uint8_t, N> array() {
        std::array<std::uint8_t, N> out{};
        auto b = bytes(N);
        std::copy(b.begin(), b.end(), out.begin());
        return out;
    }

    Rational rational() {
        const std::int64_t num = i64();
        const std::uint64_t den = u64();
        if (den == 0 || den > static_cast<std::uint64_t>(INT64_MAX)) {
            throw FrameError("rational denominator out of range");
        }
        const Rational r(num, static_cast<std::int64_t>(den));
        if (r.num() != num || static_cast<std::uint64_t>(r.den()) != den) {
            throw FrameError("rational not in lowest terms");
        }
        return r;
    }

    std::vector<Bit> bits(std::size_t count) { return unpack_bits(bytes((count + 7) / 8), count); }

    std::size_t remaining() const noexcept { return data_.size() - pos_; }

    void finish() const {
        if (pos_ != data_.size()) {
            throw FrameError("trailing bytes in message body");
        }
    }

private:
    void need(std::size_t n) const {
        if (data_.size() - pos_ < n) {
            throw FrameError("message body truncated");
        }
    }

    std::uint64_t be(int width) {
        need(static_cast<std::size_t>(width));
        std::uint64_t v = 0;
        for (int i = 0; i < width; ++i) {
            v = (v << 8) | data_[pos_++];
        }
        return v;
    }

    std::span<const std::uint8_t> data_;
    std::size_t pos_ = 0;
};

Bit read_bit(Reader& r) {
    const std::uint8_t v = r.u8();
    if (v > 1) {
        throw FrameError("bit field must be 0 or 1");
    }
    return static_cast<Bit>(v);
}

void write_payload(Writer& w, const Commitment& commitment) {
    w.u8(static_cast<std::uint8_t>(commitment.scheme()));
    if (const auto* graph = std::get_if<SubgraphPayload>(&commitment.payload)) {
        w.u16(graph->vertex_count());
        w.bits(graph->pair_bits());
        return;
    }
    const std::uint64_t value = std::get<SumPayload>(commitment.payload).value;
    const int len = value == 0 ? 1 : (std::bit_width(value) + 7) / 8;
    w.u8(static_cast<std::uint8_t>(len));
    for (int i = len - 1; i >= 0; --i) {
        w.u8(static_cast<std::uint8_t>(value >> (8 * i)));
    }
}

Commitment read_payload(Reader& r) {
    const std::uint8_t scheme = r.u8();
    if (scheme == static_cast<std::uint8_t>(SchemeId::subgraph)) {
        const std::uint32_t n = r.u16();
        if (n < 1) {
            throw FrameError("subgraph payload with no vertices");
        }
        const std::vector<Bit> bits = r.bits(pair_count(n));
        return Commitment{GraphInstance::from_pair_bits(n, bits)};
    }
    if (scheme == static_cast<std::uint8_t>(SchemeId::subset_sum)) {
        const std::uint8_t len = r.u8();
        if (len < 1 || len > 8) {
            throw FrameError("sum payload length must be 1..8 bytes");
        }
        const auto b = r.bytes(len);
        if (len > 1 && b[0] == 0) {
            throw FrameError("sum payload has a leading zero byte");
        }
        std::uint64_t value = 0;
        for (std::uint8_t byte : b) {
            value = (value << 8) | byte;
        }
        return Commitment{SumPayload{value}};
    }
    throw FrameError("unknown scheme tag in payload");
}

void write_witness(Writer& w, const Opening& opening) {
    if (const auto* subset = std::get_if<OrderedSubset>(&opening.witness)) {
        w.u16(static_cast<std::uint32_t>(subset->indices.size()));
        for (std::uint32_t v : subset->indices) {
            w.u16(v);
        }
        return;
    }
    const auto& x = std::get<SelectionBits>(opening.witness);
    w.u16(static_cast<std::uint32_t>(x.x.size()));
    w.bits(x.x);
}

} // namespace

std::string_view to_string(MessageType type) noexcept {
    switch (type) {
    case MessageType::params: return "PARAMS";
    case MessageType::toss_a: return "TOSS_A";
    case MessageType::toss_b: return "TOSS_B";
    case MessageType::toss_commit: return "TOSS_COMMIT";
    case MessageType::toss_open: return "TOSS_OPEN";
    case MessageType::commitment: return "COMMITMENT";
    case MessageType::unveil: return "UNVEIL";
    case MessageType::verdict: return "VERDICT";
    case MessageType::abort: return "ABORT";
    }
    return "UNKNOWN";
}

bool is_known_type(std::uint8_t tag) noexcept {
    switch (tag) {
    case 0x01: case 0x02: case 0x03: case 0x04: case 0x05: case 0x10: case 0x11: case 0x20: case 0x7F: return true;
    default: return false;
    }
}

std::string_view to_string(AbortCode code) noexcept {
    switch (code) {
    case AbortCode::out_of_phase: return "out-of-phase";
    case AbortCode::malformed: return "malformed";
    case AbortCode::late_arrival: return "late-arrival";
    case AbortCode::commitment_open_failure: return "commitment-open-failure";
    case AbortCode::counterparty_silent: return "counterparty-silent";
    case AbortCode::params_mismatch: return "params-mismatch";
    case AbortCode::retry_exhausted: return "retry-exhausted";
    }
    return "unknown";
}

std::vector<std::uint8_t> encode(const WireMessage& msg) {
    if (msg.body.size() > kMaxBodySize) {
        throw ParameterError("message body exceeds the frame size limit");
    }
    Writer w;
    w.u8(static_cast<std::uint8_t>(msg.type));
    w.u32(msg.body.size());
    w.bytes(msg.body);
    return w.take();
}

std::optional<std::size_t> frame_size(std::span<const std::uint8_t> bytes) {
    if (bytes.size() < kHeaderSize) {
        return std::nullopt;
    }
    const std::size_t len = (std::size_t{bytes[1]} << 24) | (std::size_t{bytes[2]} << 16) |
                            (std::size_t{bytes[3]} << 8) | std::size_t{bytes[4]};
    return kHeaderSize + len;
}

WireMessage decode(std::span<const std::uint8_t> bytes) {
    if (bytes.size() < kHeaderSize) {
        throw FrameError("frame shorter than its header");
    }
    if (!is_known_type(bytes[0])) {
        throw FrameError("unknown message tag");
    }
    const std::size_t total = *frame_size(bytes);
    if (total - kHeaderSize > kMaxBodySize) {
        throw FrameError("frame length exceeds the limit");
    }
    if (total > bytes.size()) {
        throw FrameError("frame length exceeds the available bytes");
    }
    if (total < bytes.size()) {
        throw FrameError("trailing bytes after frame");
    }
    return {static_cast<MessageType>(bytes[0]), {bytes.begin() + kHeaderSize, bytes.end()}};
}

std::vector<std::uint8_t> encode_commitment_payload(const Commitment& commitment) {
    Writer w;
    write_payload(w, commitment);
    return w.take();
}

WireMessage to_wire(const Message& msg) {
    Writer w;
    MessageType type = MessageType::abort;
    std::visit(
        [&](const auto& m) {
            using T = std::decay_t<decltype(m)>;
            if constexpr (std::is_same_v<T, ParamsMsg>) {
                type = MessageType::params;
                w.u8(static_cast<std::uint8_t>(m.scheme.scheme));
                w.u16(m.scheme.m);
                w.u16(m.scheme.n);
                w.u8(static_cast<std::uint8_t>(m.engine.kind));
                w.u64(m.engine.kind == EngineKind::seeded ? m.engine.seed : 0);
                w.u8(static_cast<std::uint8_t>(m.toss.abort_policy));
                w.u32(m.toss.retry_limit);
                w.u64(std::bit_cast<std::uint64_t>(m.toss.epsilon_target));
            } else if constexpr (std::is_same_v<T, TossContributionMsg>) {
                type = m.from_committer ? MessageType::toss_a : MessageType::toss_b;
                w.u32(m.round);
                w.u32(m.bits.size());
                w.rational(m.send_time);
                w.rational(m.send_position);
                w.bits(m.bits);
            } else if constexpr (std::is_same_v<T, TossCommitMsg>) {
                type = MessageType::toss_commit;
                w.u32(m.round);
                w.u32(m.count);
                w.bytes(m.digest);
            } else if constexpr (std::is_same_v<T, TossOpenMsg>) {
                type = MessageType::toss_open;
                w.u32(m.round);
                w.u32(m.bits.size());
                w.bytes(m.salt);
                w.bits(m.bits);
            } else if constexpr (std::is_same_v<T, CommitmentMsg>) {
                type = MessageType::commitment;
                write_payload(w, m.commitment);
            } else if constexpr (std::is_same_v<T, UnveilMsg>) {
                type = MessageType::unveil;
                if (m.opening.scheme() != m.commitment.scheme()) {
                    throw ParameterError("UNVEIL witness does not match the payload's scheme");
                }
                w.u8(static_cast<std::uint8_t>(m.opening.claimed_bit));
                write_payload(w, m.commitment);
                write_witness(w, m.opening);
            } else if constexpr (std::is_same_v<T, VerdictMsg>) {
                type = MessageType::verdict;
                w.u8(m.verdict.accepted ? 1 : 0);
                w.u8(m.verdict.accepted ? static_cast<std::uint8_t>(m.verdict.bit)
                                        : static_cast<std::uint8_t>(m.verdict.reason));
            } else {
                type = MessageType::abort;
                w.u8(static_cast<std::uint8_t>(m.code));
            }
        },
        msg);
    return {type, w.take()};
}

Message from_wire(const WireMessage& msg) {
    Reader r(msg.body);
    Message out;
    switch (msg.type) {
    case MessageType::params: {
        ParamsMsg p;
        const std::uint8_t scheme = r.u8();
        if (scheme > 1) {
            throw FrameError("unknown scheme in PARAMS");
        }
        p.scheme.scheme = static_cast<SchemeId>(scheme);
        p.scheme.m = r.u16();
        p.scheme.n = r.u16();
        const std::uint8_t engine = r.u8();
        if (engine > 2) {
            throw FrameError("unknown engine in PARAMS");
        }
        p.engine.kind = static_cast<EngineKind>(engine);
        p.engine.seed = r.u64();
        if (p.engine.kind != EngineKind::seeded && p.engine.seed != 0) {
            throw FrameError("seed present for a non-seeded engine");
        }
        const std::uint8_t policy = r.u8();
        if (policy > 1) {
            throw FrameError("unknown abort policy in PARAMS");
        }
        p.toss.abort_policy = static_cast<AbortPolicy>(policy);
        p.toss.retry_limit = r.u32();
        p.toss.epsilon_target = std::bit_cast<double>(r.u64());
        if (!(p.toss.epsilon_target > 0.0 && p.toss.epsilon_target < 0.5)) {
            throw FrameError("epsilon outside (0, 0.5)");
        }
        out = p;
        break;
    }
    case MessageType::toss_a:
    case MessageType::toss_b: {
        TossContributionMsg t;
        t.from_committer = msg.type == MessageType::toss_a;
        t.round = r.u32();
        const std::uint32_t count = r.u32();
        t.send_time = r.rational();
        t.send_position = r.rational();
        if ((std::size_t{count} + 7) / 8 != r.remaining()) {
            throw FrameError("toss bit count does not match body length");
        }
        t.bits = r.bits(count);
        out = std::move(t);
        break;
    }
    case MessageType::toss_commit: {
        TossCommitMsg t;
        t.round = r.u32();
        t.count = r.u32();
        t.digest = r.array<32>();
        out = t;
        break;
    }
    case MessageType::toss_open: {
        TossOpenMsg t;
        t.round = r.u32();
        const std::uint32_t count = r.u32();
        t.salt = r.array<32>();
        if ((std::size_t{count} + 7) / 8 != r.remaining()) {
            throw FrameError("toss bit count does not match body length");
        }
        t.bits = r.bits(count);
        out = std::move(t);
        break;
    }
    case MessageType::commitment: out = CommitmentMsg{read_payload(r)}; break;
    case MessageType::unveil: {
        UnveilMsg u;
        u.opening.claimed_bit = read_bit(r);
        u.commitment = read_payload(r);
        const std::uint32_t count = r.u16();
        if (u.commitment.scheme() == SchemeId::subgraph) {
            OrderedSubset subset;
            subset.indices.resize(count);
            for (auto& v : subset.indices) {
                v = r.u16();
            }
            u.opening.witness = std::move(subset);
        } else {
            u.opening.witness = SelectionBits{r.bits(count)};
        }
        out = std::move(u);
        break;
    }
    case MessageType::verdict: {
        const std::uint8_t accepted = r.u8();
        const std::uint8_t detail = r.u8();
        if (accepted == 1 && detail <= 1) {
            out = VerdictMsg{Verdict::accept(static_cast<Bit>(detail))};
        } else if (accepted == 0 && detail >= 1 && detail <= 4) {
            out = VerdictMsg{Verdict::reject(static_cast<RejectReason>(detail))};
        } else {
            throw FrameError("invalid VERDICT body");
        }
        break;
    }
    case MessageType::abort: {
        const std::uint8_t code = r.u8();
        if (code < 1 || code > 7) {
            throw FrameError("unknown ABORT code");
        }
        out = AbortMsg{static_cast<AbortCode>(code)};
        break;
    }
    default: throw FrameError("unknown message tag");
    }
    r.finish();
    return out;
}

std::vector<std::uint8_t> encode_graph(const GraphInstance& c) {
    Writer w;
    w.u16(c.vertex_count());
    w.bits(c.pair_bits());
    return w.take();
}

GraphInstance decode_graph(std::span<const std::uint8_t> bytes) {
    Reader r(bytes);
    const std::uint32_t m = r.u16();
    const auto bits = r.bits(pair_count(m));
    r.finish();
    return GraphInstance::from_pair_bits(m, bits);
}

std::vector<std::uint8_t> encode_knapsack(const KnapsackInstance& c) {
    const std::uint32_t m = c.size();
    std::vector<Bit> bits;
    bits.reserve(static_cast<std::size_t>(m) * m);
    for (const std::uint64_t e : c.elements()) {
        for (std::uint32_t k = m; k-- > 0;) {
            bits.push_back(bit_from((e >> k) & 1));
        }
    }
    Writer w;
    w.u16(m);
    w.bits(bits);
    return w.take();
}

KnapsackInstance decode_knapsack(std::span<const std::uint8_t> bytes) {
    Reader r(bytes);
    const std::uint32_t m = r.u16();
    if (m == 0 || m > kMaxSubsetSumM) {
        throw FrameError("knapsack size out of range");
    }
    const auto bits = r.bits(static_cast<std::size_t>(m) * m);
    r.finish();
    std::vector<std::uint64_t> elements;
    for (std::uint32_t i = 0; i < m; ++i) {
        elements.push_back(subset_sum::decode_element(std::span(bits).subspan(static_cast<std::size_t>(i) * m, m)));
    }
    try {
        return KnapsackInstance(m, std::move(elements));
    } catch (const ParameterError& e) {
        throw FrameError(e.what());
    }
}

} // namespace ct2bc::wire
