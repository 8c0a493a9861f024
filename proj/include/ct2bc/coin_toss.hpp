#pragma once

#include "ct2bc/bit.hpp"
#include "ct2bc/hash_commitment.hpp"
#include "ct2bc/rational.hpp"
#include "ct2bc/rng.hpp"

#include <cstddef>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace ct2bc {

enum class AbortPolicy : std::uint8_t { fail_session = 0, retry = 1 };

struct TossSecurityParams {
    // Bias bound the caller wants to report against. Not a proven bound for
    // the computational engines.
    double epsilon_target = 0.01;
    AbortPolicy abort_policy = AbortPolicy::fail_session;
    // Retries allowed per toss under AbortPolicy::retry.
    std::uint32_t retry_limit = 0;

    void validate() const;
    friend bool operator==(const TossSecurityParams&, const TossSecurityParams&) = default;
};

/// One spatial dimension, signal speed 1. A1 and B1 sit within
/// site_radius_delta of point_p1, A2 and B2 within site_radius_delta of
/// point_p2.
struct SpacetimeConfig {
    Rational point_p1{0};
    Rational point_p2{100};
    Rational site_radius_delta{1};
    Rational separation{100};
    Rational agreed_time_t{0};

    // separation == |p2 - p1| > 0 and separation >= 10 * delta.
    void validate() const;
    friend bool operator==(const SpacetimeConfig&, const SpacetimeConfig&) = default;
};

// Site positions used by the simulations: A1 at p1, B1 at p1 + delta/2,
// B2 at p2, A2 at p2 - delta/2 (half-deltas measured towards the other point).
struct SiteLayout {
    Rational a1;
    Rational b1;
    Rational b2;
    Rational a2;
};

SiteLayout standard_sites(const SpacetimeConfig& cfg);

// Agreed send time for the k-th toss: t + 2k * separation.
Rational round_time(const SpacetimeConfig& cfg, std::size_t k);

struct TossEvent {
    Bit sender_bit = Bit::zero;
    Rational send_time;
    Rational send_position;
    Rational receive_time;
    Rational receive_position;

    bool causal() const { return receive_time >= send_time + abs(receive_position - send_position); }
};

enum class AbortReason : std::uint8_t {
    late_arrival = 1,
    malformed_message = 2,
    commitment_open_failure = 3,
    counterparty_silent = 4,
};

std::string_view to_string(AbortReason reason) noexcept;

struct TossOutcome {
    Bit bit = Bit::zero;
    bool valid = false;
    std::optional<AbortReason> abort_reason;

    static TossOutcome ok(Bit b) { return {b, true, std::nullopt}; }
    static TossOutcome aborted(AbortReason r) { return {Bit::zero, false, r}; }
};

struct BitStream {
    std::vector<Bit> bits;
    std::string source_engine;
    std::size_t toss_count = 0;
};

/// event_a: A1 -> B1 near point_p1. event_b: B2 -> A2 near point_p2.
/// Valid iff both were sent exactly at agreed_time_t and both were received no
/// later than agreed_time_t + 2 * delta (inclusive). Non-causal events, or sites
/// outside their delta-ball, are malformed.
TossOutcome validate_relativistic_toss(const SpacetimeConfig& cfg, const TossEvent& event_a,
                                       const TossEvent& event_b);

// Hooks that turn bootstrapped_toss into an adversarial run. Defaults are honest.
struct BootstrapHooks {
    // B's reply after seeing only A's digest. nullopt = B stays silent.
    std::function<std::optional<Bit>(const Digest&)> responder;
    // Rewrites A's opening before it is sent.
    std::function<void(Bit&, Salt&)> tamper_opening;
    // Return false to withhold the opening (selective abort by A).
    std::function<bool(Bit a, Bit b)> committer_opens;
};

/// A commits a (salted SHA-256), B answers b, A opens; outcome a ^ b.
TossOutcome bootstrapped_toss(Rng& rng_a, Rng& rng_b, const BootstrapHooks& hooks = {});

/// What a dishonest B may see when choosing its contribution: earlier
/// outcomes and messages already received for this toss, never A's unsent bit.
struct AdversaryView {
    std::size_t toss_index = 0;
    std::span<const Bit> previous_outcomes;
    std::optional<Digest> received_commitment;
};

class TossAdversary {
public:
    virtual ~TossAdversary() = default;
    // nullopt: decline to send before seeing the honest bit.
    virtual std::optional<Bit> choose_early(const AdversaryView& view) = 0;
    // Reached only after choose_early declined. Whatever is sent now leaves too
    // late to be valid under the relativistic engine.
    virtual Bit respond_after_seeing(const AdversaryView& view, Bit honest_bit);
};

class FixedBitAdversary final : public TossAdversary {
public:
    explicit FixedBitAdversary(Bit bit) : bit_(bit) {}
    std::optional<Bit> choose_early(const AdversaryView&) override { return bit_; }

private:
    Bit bit_;
};

// Always waits to see A's bit, then steers the outcome to `target`.
class WaitAndSeeAdversary final : public TossAdversary {
public:
    explicit WaitAndSeeAdversary(Bit target) : target_(target) {}
    std::optional<Bit> choose_early(const AdversaryView&) override { return std::nullopt; }
    Bit respond_after_seeing(const AdversaryView&, Bit honest_bit) override { return honest_bit ^ target_; }

private:
    Bit target_;
};

enum class EngineKind : std::uint8_t { seeded = 0, relativistic_sim = 1, hash_bootstrap = 2 };

/// "relativistic-sim" | "hash-bootstrap" | "seeded:<u64 decimal>"
struct EngineSpec {
    EngineKind kind = EngineKind::seeded;
    std::uint64_t seed = 0; // only meaningful for seeded

    static EngineSpec parse(std::string_view text);
    std::string to_string() const;
    friend bool operator==(const EngineSpec&, const EngineSpec&) = default;
};

class TossEngine {
public:
    virtual ~TossEngine() = default;
    virtual std::string id() const = 0;
    virtual TossOutcome toss() = 0;
};

/// Both contributions drawn from generators derived from one seed.
class SeededTossEngine final : public TossEngine {
public:
    explicit SeededTossEngine(std::uint64_t seed, std::shared_ptr<TossAdversary> adversary_b = nullptr);
    std::string id() const override;
    TossOutcome toss() override;

private:
    std::uint64_t seed_;
    Rng rng_a_;
    Rng rng_b_;
    std::shared_ptr<TossAdversary> adversary_b_;
    std::vector<Bit> history_;
};

// Extra transit delay (beyond light travel time) for a message in toss k.
struct LatencyModel {
    std::function<Rational(std::size_t toss_index)> a_to_b;
    std::function<Rational(std::size_t toss_index)> b_to_a;
};

/// Simulated two-site relativistic toss. A1 sits at point_p1, B1 at
/// point_p1 + delta/2, B2 at point_p2, A2 at point_p2 - delta/2 (towards p1).
/// Toss k uses agreed time t + 2k * separation.
class RelativisticSimEngine final : public TossEngine {
public:
    RelativisticSimEngine(SpacetimeConfig cfg, Rng rng_a, Rng rng_b,
                          std::shared_ptr<TossAdversary> adversary_b = nullptr, LatencyModel latency = {});
    std::string id() const override { return "relativistic-sim"; }
    TossOutcome toss() override;

    const SpacetimeConfig& config() const noexcept { return cfg_; }

private:
    SpacetimeConfig cfg_;
    Rng rng_a_;
    Rng rng_b_;
    std::shared_ptr<TossAdversary> adversary_b_;
    LatencyModel latency_;
    std::vector<Bit> history_;
};

class HashBootstrapEngine final : public TossEngine {
public:
    HashBootstrapEngine(Rng rng_a, Rng rng_b, std::shared_ptr<TossAdversary> adversary_b = nullptr,
                        std::function<bool(Bit, Bit)> committer_opens = {});
    std::string id() const override { return "hash-bootstrap"; }
    TossOutcome toss() override;

private:
    Rng rng_a_;
    Rng rng_b_;
    std::shared_ptr<TossAdversary> adversary_b_;
    std::function<bool(Bit, Bit)> committer_opens_;
    std::vector<Bit> history_;
};

/// Builds an honest in-process engine. Non-seeded engines use test_seed when
/// given, OS entropy otherwise.
std::unique_ptr<TossEngine> make_engine(const EngineSpec& spec, std::optional<std::uint64_t> test_seed = std::nullopt);

class TossStreamError : public Error {
public:
    TossStreamError(AbortReason reason, std::size_t index);
    AbortReason reason() const noexcept { return reason_; }
    std::size_t index() const noexcept { return index_; }

private:
    AbortReason reason_;
    std::size_t index_;
};

/// n valid tosses from `engine`. Under AbortPolicy::retry each toss may be
/// re-run up to retry_limit times; otherwise the first abort throws.
BitStream toss_stream(TossEngine& engine, std::size_t n, const TossSecurityParams& params);

} // namespace ct2bc
