#pragma once

#include "ct2bc/channel.hpp"
#include "ct2bc/coin_toss.hpp"
#include "ct2bc/rng.hpp"
#include "ct2bc/scheme.hpp"
#include "ct2bc/transcript.hpp"
#include "ct2bc/wire.hpp"

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

namespace ct2bc::session {

enum class Phase : std::uint8_t {
    init,
    params_agreed,
    tossing,
    instances_ready,
    committed,
    unveiled,
    accepted,
    rejected,
    aborted,
};

std::string_view to_string(Phase phase) noexcept;
constexpr bool is_terminal(Phase p) noexcept {
    return p == Phase::accepted || p == Phase::rejected || p == Phase::aborted;
}

// Simulation clock each party consults when stamping arrival times: light
// travel time plus an injected extra delay for inbound messages.
struct SimClock {
    Rational inbound_latency{0};

    Rational arrival(const Rational& send_time, const Rational& from, const Rational& to) const {
        return send_time + abs(to - from) + inbound_latency;
    }
};

struct SessionConfig {
    Role role = Role::committer;
    SchemeParams scheme;
    TossSecurityParams toss;
    EngineSpec engine;
    // Deterministic mode: all of this party's randomness is derived from it.
    // Without it, a seeded engine seeds from its own seed and the other
    // engines use OS entropy.
    std::optional<std::uint64_t> test_seed;
    SpacetimeConfig spacetime;
    SimClock clock;
    Bit committed_bit = Bit::zero; // committer only
    // Test hook: the committer flips the claimed bit inside UNVEIL.
    bool tamper_unveil = false;

    std::optional<std::uint64_t> effective_seed() const;
};

/// One party's protocol state machine:
///   INIT -> PARAMS_AGREED -> TOSSING -> INSTANCES_READY -> COMMITTED
///        -> UNVEILED -> ACCEPTED | REJECTED, with ABORTED reachable from
/// every non-terminal phase. Every (phase, message) pair has a transition;
/// anything not expected aborts and emits an ABORT frame.
class SessionMachine {
public:
    explicit SessionMachine(SessionConfig config);

    // Committer: emits PARAMS. Verifier: nothing.
    std::vector<wire::WireMessage> start();
    std::vector<wire::WireMessage> advance(const wire::WireMessage& incoming);
    // Raw frame from the transport; undecodable input aborts as malformed.
    std::vector<wire::WireMessage> advance_frame(std::span<const std::uint8_t> frame);

    // Committer, INSTANCES_READY: sends COMMITMENT for config.committed_bit.
    std::vector<wire::WireMessage> commit();
    // Committer, COMMITTED: sends UNVEIL.
    std::vector<wire::WireMessage> unveil();

    // Local abort without a message (e.g. the channel went silent).
    void abort_local(wire::AbortCode code);

    Phase phase() const noexcept { return phase_; }
    bool terminal() const noexcept { return is_terminal(phase_); }
    Role role() const noexcept { return config_.role; }
    const SessionConfig& config() const noexcept { return config_; }
    const std::optional<Verdict>& verdict() const noexcept { return verdict_; }
    const std::optional<wire::AbortCode>& abort_reason() const noexcept { return abort_reason_; }
    const std::optional<InstancePair>& instances() const noexcept { return instances_; }
    const std::optional<Commitment>& commitment() const noexcept { return commitment_; }
    const std::optional<Opening>& opening() const noexcept { return opening_; }
    const Transcript& transcript() const noexcept { return transcript_; }

private:
    using Out = std::vector<wire::WireMessage>;

    Out handle(const wire::Message& msg);
    Out on_params(const wire::ParamsMsg& msg);
    Out on_contribution(const wire::TossContributionMsg& msg);
    Out on_toss_commit(const wire::TossCommitMsg& msg);
    Out on_toss_open(const wire::TossOpenMsg& msg);
    Out on_commitment(const wire::CommitmentMsg& msg);
    Out on_unveil(const wire::UnveilMsg& msg);
    Out on_verdict(const wire::VerdictMsg& msg);

    Out begin_round();
    Out retry_or_abort(wire::AbortCode code);
    Out finish_round(const std::vector<Bit>& joint);
    Out finalize_tentative();
    bool contribution_on_time(const wire::TossContributionMsg& msg, bool& malformed) const;
    wire::TossContributionMsg own_contribution(std::vector<Bit> bits) const;
    // Simulated time slot of the current attempt; retries get fresh slots.
    std::size_t slot() const;

    Out abort(wire::AbortCode code);
    Out emit(wire::Message msg);
    void record(Direction dir, std::span<const std::uint8_t> frame);

    SessionConfig config_;
    wire::ParamsMsg agreed_;
    Phase phase_ = Phase::init;
    Rng toss_rng_;
    Rng commit_rng_;

    std::uint32_t round_ = 0;
    std::size_t round_count_ = 0;
    std::uint32_t attempts_ = 0;
    std::vector<Bit> own_bits_;
    Salt own_salt_{};
    std::optional<Digest> peer_digest_;
    std::optional<std::vector<Bit>> tentative_;
    std::optional<InstanceDecoder> decoder_;

    std::optional<InstancePair> instances_;
    std::optional<Commitment> commitment_;
    std::vector<std::uint8_t> commitment_payload_bytes_;
    std::optional<Opening> opening_;
    std::optional<Verdict> verdict_;
    std::optional<wire::AbortCode> abort_reason_;

    Transcript transcript_;
    std::uint64_t clock_ = 0;
};

struct SessionResult {
    Phase phase = Phase::init;
    std::optional<Verdict> verdict;
    std::optional<wire::AbortCode> abort_reason;
    Transcript transcript;
    std::optional<InstancePair> instances; // as this side derived them
};

struct RunOptions {
    // Runs between COMMITMENT and UNVEIL on the committer side.
    std::function<void()> hold;
    // Committer stops right after sending COMMITMENT (simulates a crash).
    bool stop_after_commit = false;
};

/// Drives one party to a terminal phase over `channel`. Channel closure or
/// silence ends the session as ABORTED(counterparty-silent).
SessionResult run_session(const SessionConfig& config, Channel& channel, const RunOptions& options = {});

// Called for every frame in flight; may rewrite it. Returning false closes
// the link: the frame is dropped and the sender is treated as gone.
using Interceptor = std::function<bool(Role sender, wire::WireMessage& msg)>;

struct PairResult {
    SessionResult committer;
    SessionResult verifier;
};

/// Both parties in one thread, messages handed over directly.
PairResult run_local_pair(const SessionConfig& committer, const SessionConfig& verifier,
                          const Interceptor& intercept = {});

struct ReplayResult {
    Phase phase = Phase::init;
    std::optional<Verdict> verdict;
    std::optional<wire::AbortCode> abort_reason;
    // Every frame the replayed machine emitted equals the recorded one.
    bool outgoing_matched = false;
};

/// Re-runs the recorded party from its header, feeding the recorded inbound
/// frames. Needs a deterministic transcript (test seed or seeded engine).
ReplayResult replay(const Transcript& transcript);

SessionConfig config_from_header(const TranscriptHeader& header);

} // namespace ct2bc::session
