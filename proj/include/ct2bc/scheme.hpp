#pragma once

#include "ct2bc/bit.hpp"
#include "ct2bc/coin_toss.hpp"
#include "ct2bc/subgraph.hpp"
#include "ct2bc/subset_sum.hpp"
#include "ct2bc/verdict.hpp"

#include <array>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace ct2bc {

enum class SchemeId : std::uint8_t { subgraph = 0, subset_sum = 1 };

std::string_view to_string(SchemeId id) noexcept;
SchemeId parse_scheme(std::string_view text); // "subgraph" | "subset-sum"

// Protocol-level cap on graph sizes (the wire format carries m in 16 bits).
inline constexpr std::uint32_t kMaxGraphVertices = 2048;

struct SchemeParams {
    SchemeId scheme = SchemeId::subgraph;
    std::uint32_t m = 0;
    std::uint32_t n = 0;

    // subgraph: 1 <= n < m. subset-sum: n == m, m <= kMaxSubsetSumM.
    void validate() const;
    friend bool operator==(const SchemeParams&, const SchemeParams&) = default;
};

// Bits that identify one member of C_m: m(m-1)/2 or m^2.
std::size_t instance_bits(const SchemeParams& params);

// Coin tosses needed for c0 and c1 together: 2 * instance_bits.
std::size_t bits_required(const SchemeParams& params);

using GraphPair = std::array<GraphInstance, 2>;
using KnapsackPair = std::array<KnapsackInstance, 2>;

struct InstancePair {
    std::variant<GraphPair, KnapsackPair> instances;
    BitStream generation;
    // Extra tosses spent replacing zero knapsack elements; always 0 for graphs.
    std::size_t regeneration_tosses = 0;

    SchemeId scheme() const noexcept;
    const GraphInstance& graph(Bit which) const;
    const KnapsackInstance& knapsack(Bit which) const;
};

/// Decodes c0 from the first f(m) bits and c1 from the next f(m). Knapsack
/// elements that decode to zero stay pending until the caller supplies m fresh
/// joint tosses for each of them, in order c0 first, lowest index first.
class InstanceDecoder {
public:
    InstanceDecoder(const SchemeParams& params, BitStream stream);

    // Bits the next supply() call must provide; 0 once everything is decoded.
    std::size_t pending_bits() const noexcept { return pending_.size() * params_.m; }
    bool ready() const noexcept { return pending_.empty(); }

    void supply(std::span<const Bit> bits);
    InstancePair finish() const;

private:
    struct Slot {
        std::size_t instance;
        std::size_t element;
    };

    SchemeParams params_;
    BitStream stream_;
    std::array<std::vector<std::uint64_t>, 2> elements_;
    std::vector<Slot> pending_;
    std::size_t regeneration_tosses_ = 0;
};

// Source of fresh joint tosses for knapsack regeneration.
using RegenerationSource = std::function<std::vector<Bit>(std::size_t count)>;

/// Pure function of (params, stream) plus the regeneration tosses, if any are
/// needed. Throws ParameterError on a wrong stream length, or when a zero
/// element shows up and no source was given.
InstancePair generate_instance_pair(const SchemeParams& params, const BitStream& stream,
                                    const RegenerationSource& regenerate = {});

struct Commitment {
    std::variant<SubgraphPayload, SumPayload> payload;

    SchemeId scheme() const noexcept;
    friend bool operator==(const Commitment&, const Commitment&) = default;
};

struct Opening {
    Bit claimed_bit = Bit::zero;
    std::variant<OrderedSubset, SelectionBits> witness;

    SchemeId scheme() const noexcept;
    friend bool operator==(const Opening&, const Opening&) = default;
};

struct CommitResult {
    Commitment commitment;
    Opening opening;
};

CommitResult commit(const SchemeParams& params, const InstancePair& pair, Bit a, Rng& rng);

/// Structural check of a received commitment against the agreed parameters
/// (payload graph has n vertices; sum lies in [1, m * 2^m)).
bool commitment_well_formed(const SchemeParams& params, const Commitment& commitment);

/// Checks the opening against c_{claimed_bit} only.
Verdict verify_opening(const SchemeParams& params, const InstancePair& pair, const Commitment& commitment,
                       const Opening& opening);

/// Instance pair from a seeded engine: the stream and any regeneration tosses
/// come from SeededTossEngine(seed).
InstancePair seeded_instance_pair(const SchemeParams& params, std::uint64_t seed);

} // namespace ct2bc
