#include "ct2bc/session.hpp"

#include <deque>
#include <stdexcept>
#include <utility>

namespace ct2bc::session {
namespace {

using wire::AbortCode;
using wire::WireMessage;

Rng party_rng(const SessionConfig& config, std::uint64_t stream) {
    const auto seed = config.effective_seed();
    if (!seed) {
        return Rng::from_os_entropy();
    }
    return Rng(derive_seed(*seed, 16 * static_cast<std::uint64_t>(config.role) + stream));
}

std::vector<Bit> draw_bits(Rng& rng, std::size_t n) {
    std::vector<Bit> out(n);
    for (Bit& b : out) {
        b = rng.bit();
    }
    return out;
}

std::vector<Bit> xor_bits(const std::vector<Bit>& a, const std::vector<Bit>& b) {
    std::vector<Bit> out(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        out[i] = xor_combine(a[i], b[i]);
    }
    return out;
}

void append(std::vector<WireMessage>& out, std::vector<WireMessage> more) {
    out.insert(out.end(), std::make_move_iterator(more.begin()), std::make_move_iterator(more.end()));
}

} // namespace

std::string_view to_string(Phase phase) noexcept {
    switch (phase) {
    case Phase::init: return "INIT";
    case Phase::params_agreed: return "PARAMS_AGREED";
    case Phase::tossing: return "TOSSING";
    case Phase::instances_ready: return "INSTANCES_READY";
    case Phase::committed: return "COMMITTED";
    case Phase::unveiled: return "UNVEILED";
    case Phase::accepted: return "ACCEPTED";
    case Phase::rejected: return "REJECTED";
    case Phase::aborted: return "ABORTED";
    }
    return "UNKNOWN";
}

std::optional<std::uint64_t> SessionConfig::effective_seed() const {
    if (test_seed) {
        return test_seed;
    }
    if (engine.kind == EngineKind::seeded) {
        return engine.seed;
    }
    return std::nullopt;
}

SessionMachine::SessionMachine(SessionConfig config)
    : config_(std::move(config)), toss_rng_(party_rng(config_, 1)), commit_rng_(party_rng(config_, 2)) {
    config_.scheme.validate();
    config_.toss.validate();
    config_.spacetime.validate();
    agreed_ = wire::ParamsMsg{config_.scheme, config_.engine, config_.toss};
    if (agreed_.engine.kind != EngineKind::seeded) {
        agreed_.engine.seed = 0;
    }
    transcript_.header.role = config_.role;
    if (config_.role == Role::committer) {
        transcript_.header.committed_bit = config_.committed_bit;
    }
    transcript_.header.test_seed = config_.effective_seed();
    transcript_.header.inbound_latency = config_.clock.inbound_latency;
    transcript_.header.params = agreed_;
}

std::vector<WireMessage> SessionMachine::start() {
    if (config_.role != Role::committer || phase_ != Phase::init || !transcript_.entries.empty()) {
        return {};
    }
    return emit(agreed_);
}

std::vector<WireMessage> SessionMachine::advance(const WireMessage& incoming) {
    if (terminal()) {
        return {};
    }
    std::vector<std::uint8_t> frame;
    try {
        frame = wire::encode(incoming);
    } catch (const Error&) {
        record(Direction::received, {});
        return abort(AbortCode::malformed);
    }
    return advance_frame(frame);
}

std::vector<WireMessage> SessionMachine::advance_frame(std::span<const std::uint8_t> frame) {
    if (terminal()) {
        return {};
    }
    record(Direction::received, frame);
    wire::Message msg;
    try {
        msg = wire::from_wire(wire::decode(frame));
    } catch (const FrameError&) {
        return abort(AbortCode::malformed);
    } catch (const ParameterError&) {
        return abort(AbortCode::malformed);
    }
    return handle(msg);
}

SessionMachine::Out SessionMachine::handle(const wire::Message& msg) {
    if (const auto* a = std::get_if<wire::AbortMsg>(&msg)) {
        phase_ = Phase::aborted;
        abort_reason_ = a->code;
        return {};
    }

    Out out;
    if (tentative_) {
        // Anything but a re-run of the same round confirms the tentative one.
        const auto* c = std::get_if<wire::TossContributionMsg>(&msg);
        if (!(c && c->from_committer && c->round == round_)) {
            append(out, finalize_tentative());
        }
    }

    Out reply = std::visit(
        [this](const auto& m) -> Out {
            using T = std::decay_t<decltype(m)>;
            if constexpr (std::is_same_v<T, wire::ParamsMsg>) {
                return on_params(m);
            } else if constexpr (std::is_same_v<T, wire::TossContributionMsg>) {
                return on_contribution(m);
            } else if constexpr (std::is_same_v<T, wire::TossCommitMsg>) {
                return on_toss_commit(m);
            } else if constexpr (std::is_same_v<T, wire::TossOpenMsg>) {
                return on_toss_open(m);
            } else if constexpr (std::is_same_v<T, wire::CommitmentMsg>) {
                return on_commitment(m);
            } else if constexpr (std::is_same_v<T, wire::UnveilMsg>) {
                return on_unveil(m);
            } else if constexpr (std::is_same_v<T, wire::VerdictMsg>) {
                return on_verdict(m);
            } else {
                return {};
            }
        },
        msg);
    append(out, std::move(reply));
    return out;
}

SessionMachine::Out SessionMachine::on_params(const wire::ParamsMsg& msg) {
    if (phase_ != Phase::init || (config_.role == Role::committer && transcript_.entries.size() < 2)) {
        return abort(AbortCode::out_of_phase);
    }
    if (msg != agreed_) {
        return abort(AbortCode::params_mismatch);
    }
    phase_ = Phase::params_agreed;
    round_ = 0;
    round_count_ = bits_required(config_.scheme);
    attempts_ = 0;
    if (config_.role == Role::committer) {
        return begin_round();
    }
    return emit(agreed_);
}

std::size_t SessionMachine::slot() const {
    return static_cast<std::size_t>(round_) * (static_cast<std::size_t>(config_.toss.retry_limit) + 1) + attempts_;
}

wire::TossContributionMsg SessionMachine::own_contribution(std::vector<Bit> bits) const {
    wire::TossContributionMsg msg;
    msg.from_committer = config_.role == Role::committer;
    msg.round = round_;
    msg.bits = std::move(bits);
    if (config_.engine.kind == EngineKind::relativistic_sim) {
        const SiteLayout sites = standard_sites(config_.spacetime);
        msg.send_time = round_time(config_.spacetime, slot());
        msg.send_position = msg.from_committer ? sites.a1 : sites.b2;
    }
    return msg;
}

bool SessionMachine::contribution_on_time(const wire::TossContributionMsg& msg, bool& malformed) const {
    malformed = false;
    if (config_.engine.kind != EngineKind::relativistic_sim) {
        return true;
    }
    SpacetimeConfig round = config_.spacetime;
    round.agreed_time_t = round_time(config_.spacetime, slot());
    const Rational t = round.agreed_time_t;
    const SiteLayout sites = standard_sites(config_.spacetime);
    const Bit theirs = msg.bits.empty() ? Bit::zero : msg.bits.front();

    TossEvent event_a;
    TossEvent event_b;
    if (config_.role == Role::verifier) {
        // A1 -> B1 arrives at our site; our own B2 -> A2 leg is nominal.
        event_a = {theirs, msg.send_time, msg.send_position,
                   config_.clock.arrival(msg.send_time, msg.send_position, sites.b1), sites.b1};
        event_b = {Bit::zero, t, sites.b2, t + abs(sites.a2 - sites.b2), sites.a2};
    } else {
        event_a = {Bit::zero, t, sites.a1, t + abs(sites.b1 - sites.a1), sites.b1};
        event_b = {theirs, msg.send_time, msg.send_position,
                   config_.clock.arrival(msg.send_time, msg.send_position, sites.a2), sites.a2};
    }
    const TossOutcome outcome = validate_relativistic_toss(round, event_a, event_b);
    malformed = !outcome.valid && outcome.abort_reason == AbortReason::malformed_message;
    return outcome.valid;
}

SessionMachine::Out SessionMachine::begin_round() {
    phase_ = Phase::tossing;
    own_bits_ = draw_bits(toss_rng_, round_count_);
    if (config_.engine.kind == EngineKind::hash_bootstrap) {
        own_salt_ = random_salt(toss_rng_);
        return emit(wire::TossCommitMsg{round_, static_cast<std::uint32_t>(round_count_),
                                        commit_bits(own_bits_, own_salt_)});
    }
    return emit(own_contribution(own_bits_));
}

SessionMachine::Out SessionMachine::retry_or_abort(AbortCode code) {
    if (config_.toss.abort_policy == AbortPolicy::retry && attempts_ < config_.toss.retry_limit) {
        ++attempts_;
        return begin_round();
    }
    return abort(config_.toss.abort_policy == AbortPolicy::retry ? AbortCode::retry_exhausted : code);
}

SessionMachine::Out SessionMachine::on_contribution(const wire::TossContributionMsg& msg) {
    const bool relativistic = config_.engine.kind == EngineKind::relativistic_sim;

    if (config_.role == Role::committer) {
        if (msg.from_committer || phase_ != Phase::tossing || msg.round != round_) {
            return abort(AbortCode::out_of_phase);
        }
        if (config_.engine.kind == EngineKind::hash_bootstrap && own_bits_.empty()) {
            return abort(AbortCode::out_of_phase);
        }
        if (msg.bits.empty()) {
            // B voided the round: our contribution reached it late.
            if (!relativistic) {
                return abort(AbortCode::malformed);
            }
            return retry_or_abort(AbortCode::late_arrival);
        }
        if (msg.bits.size() != round_count_) {
            return abort(AbortCode::malformed);
        }
        bool malformed = false;
        if (!contribution_on_time(msg, malformed)) {
            return malformed ? abort(AbortCode::malformed) : retry_or_abort(AbortCode::late_arrival);
        }
        const std::vector<Bit> joint = xor_bits(own_bits_, msg.bits);
        Out out;
        if (config_.engine.kind == EngineKind::hash_bootstrap) {
            append(out, emit(wire::TossOpenMsg{round_, own_salt_, own_bits_}));
        }
        append(out, finish_round(joint));
        return out;
    }

    // Verifier.
    if (!msg.from_committer || config_.engine.kind == EngineKind::hash_bootstrap ||
        (phase_ != Phase::params_agreed && phase_ != Phase::tossing) || msg.round != round_) {
        return abort(AbortCode::out_of_phase);
    }
    if (tentative_) {
        // A re-ran the round we thought was done: she saw our bits arrive late.
        tentative_.reset();
        if (config_.toss.abort_policy != AbortPolicy::retry || attempts_ >= config_.toss.retry_limit) {
            return abort(AbortCode::retry_exhausted);
        }
        ++attempts_;
    }
    if (msg.bits.size() != round_count_) {
        return abort(AbortCode::malformed);
    }
    phase_ = Phase::tossing;
    bool malformed = false;
    if (!contribution_on_time(msg, malformed)) {
        if (malformed) {
            return abort(AbortCode::malformed);
        }
        if (config_.toss.abort_policy == AbortPolicy::retry && attempts_ < config_.toss.retry_limit) {
            Out out = emit(own_contribution({}));
            ++attempts_;
            return out;
        }
        return abort(config_.toss.abort_policy == AbortPolicy::retry ? AbortCode::retry_exhausted
                                                                      : AbortCode::late_arrival);
    }
    own_bits_ = draw_bits(toss_rng_, round_count_);
    Out out = emit(own_contribution(own_bits_));
    const std::vector<Bit> joint = xor_bits(own_bits_, msg.bits);
    if (relativistic) {
        tentative_ = joint;
        return out;
    }
    append(out, finish_round(joint));
    return out;
}

SessionMachine::Out SessionMachine::on_toss_commit(const wire::TossCommitMsg& msg) {
    if (config_.role != Role::verifier || config_.engine.kind != EngineKind::hash_bootstrap ||
        (phase_ != Phase::params_agreed && phase_ != Phase::tossing) || msg.round != round_ || peer_digest_) {
        return abort(AbortCode::out_of_phase);
    }
    if (msg.count != round_count_) {
        return abort(AbortCode::malformed);
    }
    phase_ = Phase::tossing;
    peer_digest_ = msg.digest;
    own_bits_ = draw_bits(toss_rng_, round_count_);
    return emit(own_contribution(own_bits_));
}

SessionMachine::Out SessionMachine::on_toss_open(const wire::TossOpenMsg& msg) {
    if (config_.role != Role::verifier || phase_ != Phase::tossing || !peer_digest_ || msg.round != round_) {
        return abort(AbortCode::out_of_phase);
    }
    if (msg.bits.size() != round_count_) {
        return abort(AbortCode::malformed);
    }
    if (!opening_matches(*peer_digest_, msg.bits, msg.salt)) {
        return abort(AbortCode::commitment_open_failure);
    }
    peer_digest_.reset();
    return finish_round(xor_bits(own_bits_, msg.bits));
}

SessionMachine::Out SessionMachine::finish_round(const std::vector<Bit>& joint) {
    if (round_ == 0) {
        decoder_.emplace(config_.scheme, BitStream{joint, config_.engine.to_string(), joint.size()});
    } else {
        decoder_->supply(joint);
    }
    attempts_ = 0;
    own_bits_.clear();
    if (decoder_->ready()) {
        instances_ = decoder_->finish();
        phase_ = Phase::instances_ready;
        return {};
    }
    ++round_;
    round_count_ = decoder_->pending_bits();
    if (config_.role == Role::committer) {
        return begin_round();
    }
    return {};
}

SessionMachine::Out SessionMachine::finalize_tentative() {
    const std::vector<Bit> joint = std::move(*tentative_);
    tentative_.reset();
    return finish_round(joint);
}

SessionMachine::Out SessionMachine::on_commitment(const wire::CommitmentMsg& msg) {
    if (config_.role != Role::verifier || phase_ != Phase::instances_ready) {
        return abort(AbortCode::out_of_phase);
    }
    if (!commitment_well_formed(config_.scheme, msg.commitment)) {
        return abort(AbortCode::malformed);
    }
    commitment_ = msg.commitment;
    commitment_payload_bytes_ = wire::encode_commitment_payload(msg.commitment);
    phase_ = Phase::committed;
    return {};
}

SessionMachine::Out SessionMachine::on_unveil(const wire::UnveilMsg& msg) {
    if (config_.role != Role::verifier || phase_ != Phase::committed) {
        return abort(AbortCode::out_of_phase);
    }
    phase_ = Phase::unveiled;
    opening_ = msg.opening;
    if (wire::encode_commitment_payload(msg.commitment) != commitment_payload_bytes_) {
        verdict_ = Verdict::reject(RejectReason::payload_mismatch);
    } else {
        verdict_ = verify_opening(config_.scheme, *instances_, *commitment_, msg.opening);
    }
    Out out = emit(wire::VerdictMsg{*verdict_});
    phase_ = verdict_->accepted ? Phase::accepted : Phase::rejected;
    return out;
}

SessionMachine::Out SessionMachine::on_verdict(const wire::VerdictMsg& msg) {
    if (config_.role != Role::committer || phase_ != Phase::unveiled) {
        return abort(AbortCode::out_of_phase);
    }
    verdict_ = msg.verdict;
    phase_ = msg.verdict.accepted ? Phase::accepted : Phase::rejected;
    return {};
}

std::vector<WireMessage> SessionMachine::commit() {
    if (config_.role != Role::committer || phase_ != Phase::instances_ready) {
        throw std::logic_error("commit() needs a committer with instances ready");
    }
    CommitResult result = ct2bc::commit(config_.scheme, *instances_, config_.committed_bit, commit_rng_);
    commitment_ = std::move(result.commitment);
    opening_ = std::move(result.opening);
    commitment_payload_bytes_ = wire::encode_commitment_payload(*commitment_);
    phase_ = Phase::committed;
    return emit(wire::CommitmentMsg{*commitment_});
}

std::vector<WireMessage> SessionMachine::unveil() {
    if (config_.role != Role::committer || phase_ != Phase::committed) {
        throw std::logic_error("unveil() needs a committer in COMMITTED");
    }
    Opening sent = *opening_;
    if (config_.tamper_unveil) {
        sent.claimed_bit = flip(sent.claimed_bit);
    }
    phase_ = Phase::unveiled;
    return emit(wire::UnveilMsg{*commitment_, sent});
}

void SessionMachine::abort_local(AbortCode code) {
    if (terminal()) {
        return;
    }
    phase_ = Phase::aborted;
    abort_reason_ = code;
}

SessionMachine::Out SessionMachine::abort(AbortCode code) {
    Out out = emit(wire::AbortMsg{code});
    phase_ = Phase::aborted;
    abort_reason_ = code;
    return out;
}

SessionMachine::Out SessionMachine::emit(wire::Message msg) {
    WireMessage w = wire::to_wire(msg);
    record(Direction::sent, wire::encode(w));
    return {std::move(w)};
}

void SessionMachine::record(Direction dir, std::span<const std::uint8_t> frame) {
    transcript_.entries.push_back({dir, clock_++, {frame.begin(), frame.end()}});
}

// ---------------------------------------------------------------------------

SessionResult run_session(const SessionConfig& config, Channel& channel, const RunOptions& options) {
    SessionMachine machine(config);
    const auto result = [&machine] {
        return SessionResult{machine.phase(), machine.verdict(), machine.abort_reason(), machine.transcript(),
                             machine.instances()};
    };
    const auto send_all = [&](const std::vector<WireMessage>& out) {
        for (const WireMessage& w : out) {
            try {
                channel.send(wire::encode(w));
            } catch (const ChannelClosed&) {
                machine.abort_local(AbortCode::counterparty_silent);
                return false;
            }
        }
        return true;
    };

    send_all(machine.start());
    while (!machine.terminal()) {
        if (machine.role() == Role::committer && machine.phase() == Phase::instances_ready) {
            if (!send_all(machine.commit())) {
                break;
            }
            if (options.stop_after_commit) {
                channel.close();
                return result();
            }
            if (options.hold) {
                options.hold();
            }
            send_all(machine.unveil());
            continue;
        }
        const auto frame = channel.receive();
        if (!frame) {
            machine.abort_local(AbortCode::counterparty_silent);
            break;
        }
        send_all(machine.advance_frame(*frame));
    }
    return result();
}

PairResult run_local_pair(const SessionConfig& committer, const SessionConfig& verifier, const Interceptor& intercept) {
    SessionMachine a(committer);
    SessionMachine b(verifier);
    std::deque<std::pair<Role, WireMessage>> in_flight;
    bool link_up = true;

    const auto post = [&](Role sender, std::vector<WireMessage> out) {
        for (WireMessage& w : out) {
            if (!link_up) {
                return;
            }
            if (intercept && !intercept(sender, w)) {
                link_up = false;
                return;
            }
            in_flight.emplace_back(sender, std::move(w));
        }
    };

    post(Role::committer, a.start());
    for (;;) {
        if (!in_flight.empty()) {
            auto [sender, msg] = std::move(in_flight.front());
            in_flight.pop_front();
            SessionMachine& target = sender == Role::committer ? b : a;
            const Role target_role = sender == Role::committer ? Role::verifier : Role::committer;
            post(target_role, target.advance(msg));
            continue;
        }
        if (link_up && a.phase() == Phase::instances_ready) {
            post(Role::committer, a.commit());
            continue;
        }
        if (link_up && a.phase() == Phase::committed) {
            post(Role::committer, a.unveil());
            continue;
        }
        // Nothing in flight and nobody can move: whoever is still waiting hears silence.
        a.abort_local(AbortCode::counterparty_silent);
        b.abort_local(AbortCode::counterparty_silent);
        break;
    }

    const auto result = [](const SessionMachine& m) {
        return SessionResult{m.phase(), m.verdict(), m.abort_reason(), m.transcript(), m.instances()};
    };
    return {result(a), result(b)};
}

SessionConfig config_from_header(const TranscriptHeader& header) {
    SessionConfig config;
    config.role = header.role;
    config.scheme = header.params.scheme;
    config.toss = header.params.toss;
    config.engine = header.params.engine;
    config.test_seed = header.test_seed;
    config.clock.inbound_latency = header.inbound_latency;
    config.committed_bit = header.committed_bit.value_or(Bit::zero);
    return config;
}

ReplayResult replay(const Transcript& transcript) {
    const SessionConfig config = config_from_header(transcript.header);
    if (!config.effective_seed()) {
        throw ParameterError("transcript was not recorded in deterministic mode; it cannot be replayed");
    }
    SessionMachine machine(config);
    machine.start();
    for (const TranscriptEntry& entry : transcript.entries) {
        if (machine.terminal()) {
            break;
        }
        if (entry.direction == Direction::received) {
            machine.advance_frame(entry.frame);
            continue;
        }
        const auto type = entry.frame.empty() ? 0 : entry.frame.front();
        if (type == static_cast<std::uint8_t>(wire::MessageType::commitment) &&
            machine.phase() == Phase::instances_ready && machine.role() == Role::committer) {
            machine.commit();
        } else if (type == static_cast<std::uint8_t>(wire::MessageType::unveil) && machine.phase() == Phase::committed &&
                   machine.role() == Role::committer) {
            machine.unveil();
        }
    }
    // A transcript that ends without a terminal frame was cut by silence.
    if (!machine.terminal() && transcript.entries.size() == machine.transcript().entries.size()) {
        machine.abort_local(AbortCode::counterparty_silent);
    }
    ReplayResult out;
    out.phase = machine.phase();
    out.verdict = machine.verdict();
    out.abort_reason = machine.abort_reason();
    out.outgoing_matched = machine.transcript().entries == transcript.entries;
    return out;
}

} // namespace ct2bc::session
