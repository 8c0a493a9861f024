#pragma once

#include "ct2bc/rng.hpp"
#include "ct2bc/scheme.hpp"

#include <cstdint>
#include <optional>
#include <string>

namespace ct2bc::attack {

// Hard caps for the brute-force oracles.
inline constexpr std::uint32_t kMaxAttackGraphVertices = 8;
inline constexpr std::uint32_t kMaxPlainSubsetSumM = 20;
inline constexpr std::uint32_t kMaxMitmSubsetSumM = 24;

// Throws ResourceGuardError naming the cap that `params` exceeds.
void check_resource_guard(const SchemeParams& params);

// Parameter choices too small to mean anything (tiny n or m).
bool weak_params(const SchemeParams& params);

struct SubgraphEquivocation {
    SubgraphPayload payload;
    OrderedSubset witness0;
    OrderedSubset witness1;
};

/// A payload on n vertices induced in c0 by witness0 and in c1 by witness1,
/// or nullopt when the two graphs share no induced n-vertex labelled
/// subgraph. Exhaustive: c0's ordered subsets are bucketed by induced graph,
/// then c1's are looked up.
std::optional<SubgraphEquivocation> find_equivocation_subgraph(const GraphPair& pair, std::uint32_t n);

struct SumEquivocation {
    std::uint64_t d = 0;
    SelectionBits x0;
    SelectionBits x1;
};

/// Smallest d that is a nonzero subset sum of both instances, with the
/// lexicographically first representation on each side.
std::optional<SumEquivocation> find_equivocation_subset_sum_plain(const KnapsackPair& pair);
std::optional<SumEquivocation> find_equivocation_subset_sum_mitm(const KnapsackPair& pair);
std::optional<SumEquivocation> find_equivocation_subset_sum(const KnapsackPair& pair);

bool equivocable(const SchemeParams& params, const InstancePair& pair);

enum class GuessConfidence : std::uint8_t { forced, ambiguous };

struct Guess {
    Bit guess = Bit::zero;
    GuessConfidence confidence = GuessConfidence::ambiguous;
    // Neither instance admits the payload; an honest committer never does this.
    bool protocol_violation = false;
};

/// Cheating verifier: runs the membership oracle against both instances and
/// names the unique associated one, or flips `rng` when both (or neither) fit.
Guess b_guess_bit(const SchemeParams& params, const InstancePair& pair, const Commitment& commitment, Rng& rng);

/// Exact success probability of b_guess_bit for this pair, averaged over a
/// uniform committed bit and the honest committer's randomness.
double exact_guess_success(const SchemeParams& params, const InstancePair& pair);

struct Interval {
    double lo = 0.0;
    double hi = 1.0;
};

inline constexpr double kZ95 = 1.959963984540054;

// Wilson score interval for successes / trials.
Interval wilson_interval(std::uint64_t successes, std::uint64_t trials, double z = kZ95);

struct HarnessOptions {
    unsigned threads = 1;
    // Also compute the per-trial exact advantage (concealment only). Skipped
    // for subset-sum above m = kMaxPlainSubsetSumM.
    bool exact = true;
};

struct BindingReport {
    SchemeParams params;
    std::uint64_t trials = 0;
    std::uint64_t seed = 0;
    std::uint64_t equivocable = 0;
    double equivocable_fraction = 0.0;
    Interval interval;
    // Best-found single-payload strategy: a committer can always open c0, and
    // can also open c1 exactly when an equivocating payload exists.
    double p0_hat = 0.0;
    double p1_hat = 0.0;
    double estimated_epsilon = 0.0;
    bool weak_params = false;
};

struct ConcealmentReport {
    SchemeParams params;
    std::uint64_t trials = 0;
    std::uint64_t seed = 0;
    std::uint64_t successes = 0;
    std::uint64_t forced = 0;
    std::uint64_t ambiguous = 0;
    std::uint64_t ambiguous_successes = 0;
    std::uint64_t protocol_violations = 0;
    double guess_advantage = 0.0;
    Interval interval; // on the advantage
    std::optional<double> exact_advantage;
    bool weak_params = false;
};

/// Monte Carlo over fresh instance pairs; trial t uses derive_seed(seed, t), so
/// the result does not depend on options.threads.
BindingReport estimate_binding(const SchemeParams& params, std::uint64_t trials, std::uint64_t seed,
                               const HarnessOptions& options = {});
ConcealmentReport estimate_concealment(const SchemeParams& params, std::uint64_t trials, std::uint64_t seed,
                                       const HarnessOptions& options = {});

struct AbortBiasReport {
    std::uint64_t tosses = 0;
    std::uint32_t retry_limit = 0;
    std::uint64_t seed = 0;
    std::uint64_t ones = 0;
    std::uint64_t failed_tosses = 0;
    double frequency_one = 0.0;
    Interval interval;
};

/// Hash-bootstrapped tossing against a committer who withholds her opening
/// whenever the outcome would be 0, with the honest side retrying aborted
/// tosses up to retry_limit times.
AbortBiasReport measure_abort_bias(std::uint64_t tosses, std::uint64_t seed, std::uint32_t retry_limit);

} // namespace ct2bc::attack
