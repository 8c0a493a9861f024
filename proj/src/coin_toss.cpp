#include "ct2bc/coin_toss.hpp"

#include <charconv>
#include <cmath>
#include <utility>

namespace ct2bc {

void TossSecurityParams::validate() const {
    if (!(epsilon_target > 0.0 && epsilon_target < 0.5)) {
        throw ParameterError("epsilon_target must lie in (0, 0.5)");
    }
}

void SpacetimeConfig::validate() const {
    if (site_radius_delta <= Rational(0)) {
        throw ParameterError("site radius delta must be positive");
    }
    if (separation <= Rational(0) || separation != abs(point_p2 - point_p1)) {
        throw ParameterError("separation must equal |p2 - p1| and be positive");
    }
    if (separation < Rational(10) * site_radius_delta) {
        throw ParameterError("separation must be at least 10 * delta");
    }
}

SiteLayout standard_sites(const SpacetimeConfig& cfg) {
    const Rational half = cfg.site_radius_delta / Rational(2);
    const Rational toward_p2 = cfg.point_p2 > cfg.point_p1 ? half : -half;
    return {cfg.point_p1, cfg.point_p1 + toward_p2, cfg.point_p2, cfg.point_p2 - toward_p2};
}

Rational round_time(const SpacetimeConfig& cfg, std::size_t k) {
    return cfg.agreed_time_t + Rational(2) * Rational(static_cast<std::int64_t>(k)) * cfg.separation;
}

std::string_view to_string(AbortReason reason) noexcept {
    switch (reason) {
    case AbortReason::late_arrival: return "late-arrival";
    case AbortReason::malformed_message: return "malformed-message";
    case AbortReason::commitment_open_failure: return "commitment-open-failure";
    case AbortReason::counterparty_silent: return "counterparty-silent";
    }
    return "unknown";
}

TossOutcome validate_relativistic_toss(const SpacetimeConfig& cfg, const TossEvent& event_a,
                                       const TossEvent& event_b) {
    const Rational& delta = cfg.site_radius_delta;
    const auto near = [&delta](const Rational& pos, const Rational& point) { return abs(pos - point) <= delta; };

    if (!event_a.causal() || !event_b.causal()) {
        return TossOutcome::aborted(AbortReason::malformed_message);
    }
    if (!near(event_a.send_position, cfg.point_p1) || !near(event_a.receive_position, cfg.point_p1) ||
        !near(event_b.send_position, cfg.point_p2) || !near(event_b.receive_position, cfg.point_p2)) {
        return TossOutcome::aborted(AbortReason::malformed_message);
    }

    const Rational deadline = cfg.agreed_time_t + Rational(2) * delta;
    const bool sent_on_time = event_a.send_time == cfg.agreed_time_t && event_b.send_time == cfg.agreed_time_t;
    const bool received_on_time = event_a.receive_time <= deadline && event_b.receive_time <= deadline;
    if (!sent_on_time || !received_on_time) {
        return TossOutcome::aborted(AbortReason::late_arrival);
    }
    return TossOutcome::ok(xor_combine(event_a.sender_bit, event_b.sender_bit));
}

TossOutcome bootstrapped_toss(Rng& rng_a, Rng& rng_b, const BootstrapHooks& hooks) {
    // A -> B: commitment to a.
    const Bit a = rng_a.bit();
    const Salt salt = random_salt(rng_a);
    const Digest digest = commit_bit(a, salt);

    // B -> A: b, chosen knowing only the digest.
    const std::optional<Bit> b = hooks.responder ? hooks.responder(digest) : std::optional<Bit>(rng_b.bit());
    if (!b) {
        return TossOutcome::aborted(AbortReason::counterparty_silent);
    }

    // A -> B: opening.
    if (hooks.committer_opens && !hooks.committer_opens(a, *b)) {
        return TossOutcome::aborted(AbortReason::counterparty_silent);
    }
    Bit opened_bit = a;
    Salt opened_salt = salt;
    if (hooks.tamper_opening) {
        hooks.tamper_opening(opened_bit, opened_salt);
    }
    if (!opening_matches(digest, std::span<const Bit>(&opened_bit, 1), opened_salt)) {
        return TossOutcome::aborted(AbortReason::commitment_open_failure);
    }
    return TossOutcome::ok(xor_combine(opened_bit, *b));
}

Bit TossAdversary::respond_after_seeing(const AdversaryView&, Bit honest_bit) { return honest_bit; }

// ---------------------------------------------------------------------------

EngineSpec EngineSpec::parse(std::string_view text) {
    if (text == "relativistic-sim") {
        return {EngineKind::relativistic_sim, 0};
    }
    if (text == "hash-bootstrap") {
        return {EngineKind::hash_bootstrap, 0};
    }
    constexpr std::string_view prefix = "seeded:";
    if (text.starts_with(prefix)) {
        const std::string_view digits = text.substr(prefix.size());
        std::uint64_t seed = 0;
        auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), seed);
        if (!digits.empty() && ec == std::errc{} && ptr == digits.data() + digits.size()) {
            return {EngineKind::seeded, seed};
        }
    }
    throw ParameterError("unknown toss engine '" + std::string(text) +
                         "' (expected relativistic-sim, hash-bootstrap or seeded:<u64>)");
}

std::string EngineSpec::to_string() const {
    switch (kind) {
    case EngineKind::relativistic_sim: return "relativistic-sim";
    case EngineKind::hash_bootstrap: return "hash-bootstrap";
    case EngineKind::seeded: break;
    }
    return "seeded:" + std::to_string(seed);
}

SeededTossEngine::SeededTossEngine(std::uint64_t seed, std::shared_ptr<TossAdversary> adversary_b)
    : seed_(seed), rng_a_(derive_seed(seed, 0)), rng_b_(derive_seed(seed, 1)), adversary_b_(std::move(adversary_b)) {}

std::string SeededTossEngine::id() const { return EngineSpec{EngineKind::seeded, seed_}.to_string(); }

TossOutcome SeededTossEngine::toss() {
    const Bit a = rng_a_.bit();
    Bit b = Bit::zero;
    if (adversary_b_) {
        const auto early = adversary_b_->choose_early({history_.size(), history_, std::nullopt});
        if (!early) {
            // No timing model here; declining to contribute is silence.
            return TossOutcome::aborted(AbortReason::counterparty_silent);
        }
        b = *early;
    } else {
        b = rng_b_.bit();
    }
    const Bit outcome = xor_combine(a, b);
    history_.push_back(outcome);
    return TossOutcome::ok(outcome);
}

RelativisticSimEngine::RelativisticSimEngine(SpacetimeConfig cfg, Rng rng_a, Rng rng_b,
                                             std::shared_ptr<TossAdversary> adversary_b, LatencyModel latency)
    : cfg_(std::move(cfg)), rng_a_(std::move(rng_a)), rng_b_(std::move(rng_b)), adversary_b_(std::move(adversary_b)),
      latency_(std::move(latency)) {
    cfg_.validate();
}

TossOutcome RelativisticSimEngine::toss() {
    const std::size_t k = history_.size();
    SpacetimeConfig round = cfg_;
    round.agreed_time_t = round_time(cfg_, k);
    const Rational t = round.agreed_time_t;
    const SiteLayout sites = standard_sites(cfg_);

    const Bit a = rng_a_.bit();

    Bit b = Bit::zero;
    Rational b_send_time = t;
    if (adversary_b_) {
        const AdversaryView view{k, history_, std::nullopt};
        if (auto early = adversary_b_->choose_early(view)) {
            b = *early;
        } else {
            // a cannot reach B2 before t + |b2 - a1|, so that is the earliest
            // moment a reply informed by a can leave.
            b_send_time = t + abs(sites.b2 - sites.a1);
            b = adversary_b_->respond_after_seeing(view, a);
        }
    } else {
        b = rng_b_.bit();
    }

    const Rational extra_ab = latency_.a_to_b ? latency_.a_to_b(k) : Rational(0);
    const Rational extra_ba = latency_.b_to_a ? latency_.b_to_a(k) : Rational(0);
    const TossEvent event_a{a, t, sites.a1, t + abs(sites.b1 - sites.a1) + extra_ab, sites.b1};
    const TossEvent event_b{b, b_send_time, sites.b2, b_send_time + abs(sites.a2 - sites.b2) + extra_ba, sites.a2};

    const TossOutcome outcome = validate_relativistic_toss(round, event_a, event_b);
    // Every attempt consumes a time slot, valid or not.
    history_.push_back(outcome.valid ? outcome.bit : Bit::zero);
    return outcome;
}

HashBootstrapEngine::HashBootstrapEngine(Rng rng_a, Rng rng_b, std::shared_ptr<TossAdversary> adversary_b,
                                         std::function<bool(Bit, Bit)> committer_opens)
    : rng_a_(std::move(rng_a)), rng_b_(std::move(rng_b)), adversary_b_(std::move(adversary_b)),
      committer_opens_(std::move(committer_opens)) {}

TossOutcome HashBootstrapEngine::toss() {
    BootstrapHooks hooks;
    if (adversary_b_) {
        hooks.responder = [this](const Digest& digest) {
            return adversary_b_->choose_early({history_.size(), history_, digest});
        };
    }
    hooks.committer_opens = committer_opens_;
    const TossOutcome outcome = bootstrapped_toss(rng_a_, rng_b_, hooks);
    if (outcome.valid) {
        history_.push_back(outcome.bit);
    }
    return outcome;
}

std::unique_ptr<TossEngine> make_engine(const EngineSpec& spec, std::optional<std::uint64_t> test_seed) {
    const auto party_rng = [&test_seed](std::uint64_t stream) {
        return test_seed ? Rng(derive_seed(*test_seed, stream)) : Rng::from_os_entropy();
    };
    switch (spec.kind) {
    case EngineKind::seeded: return std::make_unique<SeededTossEngine>(spec.seed);
    case EngineKind::relativistic_sim:
        return std::make_unique<RelativisticSimEngine>(SpacetimeConfig{}, party_rng(0), party_rng(1));
    case EngineKind::hash_bootstrap: return std::make_unique<HashBootstrapEngine>(party_rng(0), party_rng(1));
    }
    throw ParameterError("unknown engine kind");
}

TossStreamError::TossStreamError(AbortReason reason, std::size_t index)
    : Error("toss " + std::to_string(index) + " aborted: " + std::string(to_string(reason))), reason_(reason),
      index_(index) {}

BitStream toss_stream(TossEngine& engine, std::size_t n, const TossSecurityParams& params) {
    params.validate();
    BitStream out;
    out.source_engine = engine.id();
    out.toss_count = n;
    out.bits.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        std::uint32_t retries = 0;
        for (;;) {
            const TossOutcome outcome = engine.toss();
            if (outcome.valid) {
                out.bits.push_back(outcome.bit);
                break;
            }
            const AbortReason reason = outcome.abort_reason.value_or(AbortReason::malformed_message);
            if (params.abort_policy == AbortPolicy::fail_session || retries >= params.retry_limit) {
                throw TossStreamError(reason, i);
            }
            ++retries;
        }
    }
    return out;
}

} // namespace ct2bc
