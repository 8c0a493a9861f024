#include "ct2bc/errors.hpp"
#include "ct2bc/session.hpp"

#include "wire_gen.hpp"

#include "fixtures.hpp"

#include <doctest.h>

#include <thread>

using namespace ct2bc;
using namespace ct2bc::session;
using wire::AbortCode;
using wire::MessageType;

namespace {

SessionConfig config(Role role, SchemeParams scheme, std::string_view engine, std::optional<std::uint64_t> test_seed,
                     Bit bit = Bit::zero) {
    SessionConfig c;
    c.role = role;
    c.scheme = scheme;
    c.engine = EngineSpec::parse(engine);
    c.test_seed = test_seed;
    c.committed_bit = bit;
    return c;
}

PairResult honest(SchemeParams p, std::string_view engine, Bit bit, std::uint64_t seed, const Interceptor& ic = {}) {
    return run_local_pair(config(Role::committer, p, engine, derive_seed(seed, 1), bit),
                          config(Role::verifier, p, engine, derive_seed(seed, 2)), ic);
}

const SchemeParams kGraph{SchemeId::subgraph, 6, 3};
const SchemeParams kSum{SchemeId::subset_sum, 16, 16};

std::vector<MessageType> types(const Transcript& t, Direction d) {
    std::vector<MessageType> out;
    for (const auto& e : t.entries) {
        if (e.direction == d) {
            out.push_back(static_cast<MessageType>(e.frame.at(0)));
        }
    }
    return out;
}

} // namespace

TEST_CASE("honest sessions accept for every engine") {
    for (const auto* engine : {"seeded:42", "relativistic-sim", "hash-bootstrap"}) {
        for (const SchemeParams& p : {kGraph, kSum, SchemeParams{SchemeId::subset_sum, 3, 3}}) {
            for (const Bit bit : {Bit::zero, Bit::one}) {
                CAPTURE(engine);
                CAPTURE(p.m);
                const auto r = honest(p, engine, bit, 5);
                CHECK(r.committer.phase == Phase::accepted);
                CHECK(r.verifier.phase == Phase::accepted);
                REQUIRE(r.verifier.verdict);
                CHECK(*r.verifier.verdict == Verdict::accept(bit));
            }
        }
    }
}

TEST_CASE("message order of an honest seeded session") {
    const auto r = honest(kGraph, "seeded:42", Bit::one, 1);
    CHECK(types(r.committer.transcript, Direction::sent) ==
          std::vector{MessageType::params, MessageType::toss_a, MessageType::commitment, MessageType::unveil});
    CHECK(types(r.verifier.transcript, Direction::sent) ==
          std::vector{MessageType::params, MessageType::toss_b, MessageType::verdict});
}

TEST_CASE("frozen honest transcript") {
    // Regression fixture: size and hash-free checksum of the committer's file.
    const auto r = honest(kGraph, "seeded:42", Bit::one, 1);
    const auto bytes = r.committer.transcript.serialize();
    std::uint64_t sum = 1469598103934665603ull; // FNV-1a
    for (const auto b : bytes) {
        sum = (sum ^ b) * 1099511628211ull;
    }
    CHECK(bytes.size() == fixture::kSessionSize);
    CHECK(sum == fixture::kSessionFnv);
}

TEST_CASE("the claimed bit first appears inside UNVEIL") {
    const auto r = honest(kGraph, "seeded:42", Bit::one, 3);
    const auto& entries = r.verifier.transcript.entries;
    // Everything before UNVEIL is independent of the committed bit.
    const auto r0 = honest(kGraph, "seeded:42", Bit::zero, 3);
    const auto& entries0 = r0.verifier.transcript.entries;
    REQUIRE(entries.size() == entries0.size());
    for (std::size_t i = 0; i < entries.size(); ++i) {
        const auto type = static_cast<MessageType>(entries[i].frame.at(0));
        if (type == MessageType::unveil || type == MessageType::verdict) {
            break;
        }
        if (type == MessageType::commitment) {
            continue; // payload depends on c_a by design, never on the bit's encoding
        }
        CHECK(entries[i] == entries0[i]);
    }
}

TEST_CASE("determinism: same seeds, byte-identical transcripts") {
    for (const auto* engine : {"seeded:9", "relativistic-sim", "hash-bootstrap"}) {
        const auto a = honest(kSum, engine, Bit::one, 77);
        const auto b = honest(kSum, engine, Bit::one, 77);
        CHECK(a.committer.transcript.serialize() == b.committer.transcript.serialize());
        CHECK(a.verifier.transcript.serialize() == b.verifier.transcript.serialize());
    }
}

TEST_CASE("replay reproduces phase and verdict") {
    for (const auto* engine : {"seeded:9", "relativistic-sim", "hash-bootstrap"}) {
        const auto r = honest(kGraph, engine, Bit::one, 8);
        for (const auto* side : {&r.committer, &r.verifier}) {
            const auto parsed = Transcript::parse(side->transcript.serialize());
            const auto rep = replay(parsed);
            CHECK(rep.outgoing_matched);
            CHECK(rep.phase == side->phase);
            CHECK(rep.verdict == side->verdict);
        }
    }
    Transcript nondeterministic;
    nondeterministic.header.params.engine = EngineSpec::parse("hash-bootstrap");
    nondeterministic.header.params.scheme = kGraph;
    CHECK_THROWS_AS(replay(nondeterministic), ParameterError);
}

TEST_CASE("out-of-phase and malformed input abort") {
    SUBCASE("UNVEIL before COMMITMENT") {
        SessionMachine b(config(Role::verifier, kGraph, "seeded:1", 1));
        wire::UnveilMsg u;
        u.commitment = Commitment{GraphInstance(3)};
        u.opening.witness = OrderedSubset{{1, 2, 3}};
        const auto out = b.advance(wire::to_wire(u));
        CHECK(b.phase() == Phase::aborted);
        CHECK(b.abort_reason() == AbortCode::out_of_phase);
        REQUIRE(out.size() == 1);
        CHECK(out[0].type == MessageType::abort);
    }
    SUBCASE("truncated COMMITMENT") {
        const Interceptor cut = [](Role sender, wire::WireMessage& m) {
            if (sender == Role::committer && m.type == MessageType::commitment) {
                m.body.pop_back();
            }
            return true;
        };
        const auto r = honest(kGraph, "seeded:42", Bit::zero, 2, cut);
        CHECK(r.verifier.phase == Phase::aborted);
        CHECK(r.verifier.abort_reason == AbortCode::malformed);
        CHECK(r.committer.phase == Phase::aborted);
        CHECK(r.committer.abort_reason == AbortCode::malformed);
    }
    SUBCASE("garbage frame") {
        SessionMachine b(config(Role::verifier, kGraph, "seeded:1", 1));
        const std::vector<std::uint8_t> junk{0x99, 1, 2};
        b.advance_frame(junk);
        CHECK(b.abort_reason() == AbortCode::malformed);
        CHECK(b.transcript().entries.front().frame == junk);
        CHECK(b.advance_frame(junk).empty()); // terminal: no more output
    }
    SUBCASE("parameter mismatch") {
        auto a = config(Role::committer, kGraph, "seeded:1", 1);
        auto b = config(Role::verifier, SchemeParams{SchemeId::subgraph, 6, 2}, "seeded:1", 2);
        const auto r = run_local_pair(a, b);
        CHECK(r.verifier.abort_reason == AbortCode::params_mismatch);
        CHECK(r.committer.phase == Phase::aborted);
    }
}

TEST_CASE("tampered unveil is rejected on both sides") {
    auto a = config(Role::committer, kGraph, "seeded:4", 1, Bit::one);
    a.tamper_unveil = true;
    int rejected = 0;
    for (std::uint64_t s = 0; s < 20; ++s) {
        a.engine.seed = s;
        auto b = config(Role::verifier, kGraph, "seeded:0", 2);
        b.engine.seed = s;
        const auto r = run_local_pair(a, b);
        // A flipped claim can occasionally still verify; the verdict tells.
        if (r.verifier.phase == Phase::rejected) {
            ++rejected;
            CHECK(r.verifier.verdict->reason == RejectReason::association_fails);
            CHECK(r.committer.phase == Phase::rejected);
        }
    }
    CHECK(rejected > 10);
}

TEST_CASE("payload swapped inside UNVEIL") {
    const Interceptor swap = [](Role sender, wire::WireMessage& m) {
        if (sender == Role::committer && m.type == MessageType::unveil) {
            auto u = std::get<wire::UnveilMsg>(wire::from_wire(m));
            auto g = std::get<SubgraphPayload>(u.commitment.payload);
            g.set_edge(1, 2, !g.has_edge(1, 2));
            u.commitment.payload = g;
            m = wire::to_wire(u);
        }
        return true;
    };
    const auto r = honest(kGraph, "seeded:42", Bit::zero, 3, swap);
    CHECK(r.verifier.phase == Phase::rejected);
    CHECK(r.verifier.verdict->reason == RejectReason::payload_mismatch);
}

TEST_CASE("committer disappears after COMMITMENT") {
    const Interceptor drop = [](Role sender, wire::WireMessage& m) {
        return !(sender == Role::committer && m.type == MessageType::unveil);
    };
    const auto r = honest(kSum, "seeded:42", Bit::zero, 3, drop);
    CHECK(r.verifier.phase == Phase::aborted);
    CHECK(r.verifier.abort_reason == AbortCode::counterparty_silent);
    const auto t = types(r.verifier.transcript, Direction::received);
    CHECK(std::find(t.begin(), t.end(), MessageType::commitment) != t.end());
}

TEST_CASE("hash toss: tampered opening aborts") {
    const Interceptor tamper = [](Role sender, wire::WireMessage& m) {
        if (sender == Role::committer && m.type == MessageType::toss_open) {
            m.body.back() ^= 0x80;
        }
        return true;
    };
    const auto r = honest(kGraph, "hash-bootstrap", Bit::zero, 3, tamper);
    CHECK(r.verifier.abort_reason == AbortCode::commitment_open_failure);
}

TEST_CASE("relativistic toss: late arrivals") {
    auto a = config(Role::committer, kGraph, "relativistic-sim", 1);
    auto b = config(Role::verifier, kGraph, "relativistic-sim", 2);
    SUBCASE("fail policy aborts") {
        b.clock.inbound_latency = Rational(2); // A's bits reach B too late
        const auto r = run_local_pair(a, b);
        CHECK(r.verifier.abort_reason == AbortCode::late_arrival);
        CHECK(r.committer.abort_reason == AbortCode::late_arrival);
    }
    SUBCASE("late on the committer side") {
        a.clock.inbound_latency = Rational(2);
        const auto r = run_local_pair(a, b);
        CHECK(r.committer.abort_reason == AbortCode::late_arrival);
    }
    SUBCASE("retries are exhausted when the delay persists") {
        for (auto* c : {&a, &b}) {
            c->toss.abort_policy = AbortPolicy::retry;
            c->toss.retry_limit = 3;
        }
        b.clock.inbound_latency = Rational(2);
        const auto r = run_local_pair(a, b);
        CHECK(r.verifier.abort_reason == AbortCode::retry_exhausted);
        CHECK(r.committer.abort_reason == AbortCode::retry_exhausted);
        a.clock.inbound_latency = Rational(2);
        b.clock.inbound_latency = Rational(0);
        const auto r2 = run_local_pair(a, b);
        CHECK(r2.committer.abort_reason == AbortCode::retry_exhausted);
        CHECK(r2.verifier.phase == Phase::aborted);
    }
    SUBCASE("within the window is fine") {
        a.clock.inbound_latency = Rational(3, 2); // 1/2 + 3/2 = 2 = 2 delta exactly
        b.clock.inbound_latency = Rational(3, 2);
        const auto r = run_local_pair(a, b);
        CHECK(r.verifier.phase == Phase::accepted);
    }
}

TEST_CASE("relativistic toss: a transient delay is absorbed by a retry") {
    // Delay only the first TOSS_A by rewriting its send time to a past slot.
    auto a = config(Role::committer, kGraph, "relativistic-sim", 1);
    auto b = config(Role::verifier, kGraph, "relativistic-sim", 2);
    for (auto* c : {&a, &b}) {
        c->toss.abort_policy = AbortPolicy::retry;
        c->toss.retry_limit = 2;
    }
    bool first = true;
    const Interceptor late_once = [&](Role sender, wire::WireMessage& m) {
        if (sender == Role::committer && m.type == MessageType::toss_a && first) {
            first = false;
            auto t = std::get<wire::TossContributionMsg>(wire::from_wire(m));
            t.send_time = t.send_time - Rational(5);
            m = wire::to_wire(t);
        }
        return true;
    };
    const auto r = run_local_pair(a, b, late_once);
    CHECK(r.verifier.phase == Phase::accepted);
    CHECK(r.committer.phase == Phase::accepted);
}

TEST_CASE("state machine totality under random frames") {
    Rng rng(31337);
    for (int i = 0; i < 2000; ++i) {
        const Role role = rng.bit() == Bit::one ? Role::committer : Role::verifier;
        const auto* engine = std::array{"seeded:3", "relativistic-sim", "hash-bootstrap"}[rng.uniform(3)];
        SessionMachine m(config(role, kGraph, engine, 5));
        m.start();
        for (int step = 0; step < 8 && !m.terminal(); ++step) {
            if (rng.uniform(4) == 0) {
                std::vector<std::uint8_t> junk(rng.uniform(40));
                rng.fill(junk);
                m.advance_frame(junk);
            } else {
                m.advance(wire::to_wire(wire_gen::message(rng)));
            }
        }
        // Random traffic either ends the session or leaves it waiting; it never throws.
        if (!m.terminal()) {
            m.abort_local(AbortCode::counterparty_silent);
        }
        CHECK(m.terminal());
    }
}

TEST_CASE("malformed frames always abort") {
    Rng rng(99);
    int aborted = 0;
    for (int i = 0; i < 500; ++i) {
        const auto victim = rng.bit() == Bit::one ? Role::committer : Role::verifier;
        const auto step = rng.uniform(5);
        int seen = 0;
        const Interceptor corrupt = [&](Role sender, wire::WireMessage& m) {
            if (sender != victim && seen++ == static_cast<int>(step)) {
                // Truncate, extend or retag into something that cannot parse.
                switch (rng.uniform(3)) {
                case 0: m.body.resize(m.body.size() / 2 == m.body.size() ? 0 : m.body.size() / 2); break;
                case 1: m.body.insert(m.body.end(), {0xFF, 0xFF, 0xFF}); break;
                default: m.body.assign(1, 0xEE); break;
                }
            }
            return true;
        };
        const auto r = honest(kGraph, "seeded:1", Bit::zero, i, corrupt);
        const auto& side = victim == Role::committer ? r.verifier : r.committer;
        if (seen > static_cast<int>(step)) {
            aborted += r.committer.phase == Phase::aborted || r.verifier.phase == Phase::aborted;
        } else {
            aborted += side.phase == Phase::accepted; // corruption never happened
        }
    }
    CHECK(aborted == 500);
}

TEST_CASE("run_session over in-memory channels, two threads") {
    auto [ca, cb] = memory_channel_pair(std::chrono::seconds(5));
    SessionResult ra;
    SessionResult rb;
    std::thread ta([&, &ch = *ca] { ra = run_session(config(Role::committer, kSum, "seeded:5", 1, Bit::one), ch); });
    std::thread tb([&, &ch = *cb] { rb = run_session(config(Role::verifier, kSum, "seeded:5", 2), ch); });
    ta.join();
    tb.join();
    CHECK(ra.phase == Phase::accepted);
    CHECK(rb.phase == Phase::accepted);
    CHECK(*rb.verdict == Verdict::accept(Bit::one));
}

TEST_CASE("run_session: committer stops after COMMITMENT") {
    auto [ca, cb] = memory_channel_pair(std::chrono::milliseconds(300));
    SessionResult ra;
    SessionResult rb;
    RunOptions crash;
    crash.stop_after_commit = true;
    std::thread ta([&, &ch = *ca] { ra = run_session(config(Role::committer, kGraph, "seeded:5", 1), ch, crash); });
    std::thread tb([&, &ch = *cb] { rb = run_session(config(Role::verifier, kGraph, "seeded:5", 2), ch); });
    ta.join();
    tb.join();
    CHECK(ra.phase == Phase::committed);
    CHECK(rb.phase == Phase::aborted);
    CHECK(rb.abort_reason == AbortCode::counterparty_silent);
    const auto t = types(rb.transcript, Direction::received);
    CHECK(t.back() == MessageType::commitment);
}

TEST_CASE("hold between commit and unveil") {
    auto [ca, cb] = memory_channel_pair(std::chrono::seconds(5));
    SessionResult ra;
    SessionResult rb;
    bool held = false;
    RunOptions opts;
    opts.hold = [&] { held = true; };
    std::thread ta([&, &ch = *ca] { ra = run_session(config(Role::committer, kGraph, "hash-bootstrap", 1), ch, opts); });
    std::thread tb([&, &ch = *cb] { rb = run_session(config(Role::verifier, kGraph, "hash-bootstrap", 2), ch); });
    ta.join();
    tb.join();
    CHECK(held);
    CHECK(rb.phase == Phase::accepted);
}
