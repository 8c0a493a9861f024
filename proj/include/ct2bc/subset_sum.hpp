#pragma once

#include "ct2bc/bit.hpp"
#include "ct2bc/verdict.hpp"

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace ct2bc {

class Rng;

// Largest m for which m * (2^m - 1) still fits in 64 bits.
inline constexpr std::uint32_t kMaxSubsetSumM = 58;

/// Ordered elements c_1..c_m, each in [1, 2^m). Duplicates allowed.
class KnapsackInstance {
public:
    KnapsackInstance() = default;
    KnapsackInstance(std::uint32_t m, std::vector<std::uint64_t> elements);

    std::uint32_t size() const noexcept { return m_; }
    std::span<const std::uint64_t> elements() const noexcept { return elements_; }
    std::uint64_t operator[](std::size_t i) const { return elements_.at(i); }

    // m / max bit length of the elements.
    double density() const;

    friend bool operator==(const KnapsackInstance&, const KnapsackInstance&) = default;

private:
    std::uint32_t m_ = 0;
    std::vector<std::uint64_t> elements_;
};

struct SelectionBits {
    std::vector<Bit> x;
    friend bool operator==(const SelectionBits&, const SelectionBits&) = default;
    friend auto operator<=>(const SelectionBits&, const SelectionBits&) = default;
};

struct SumPayload {
    std::uint64_t value = 0;
    friend bool operator==(const SumPayload&, const SumPayload&) = default;
};

namespace subset_sum {

// Exclusive upper bound m * 2^m on any committed value.
std::uint64_t payload_bound(std::uint32_t m);

// Element-major, most significant bit first: m bits per element.
// Returns 0 for an all-zero field; callers regenerate those.
std::uint64_t decode_element(std::span<const Bit> bits);

bool is_well_formed(const SelectionBits& x, std::uint32_t m);

std::uint64_t selected_sum(const KnapsackInstance& c, const SelectionBits& x);

struct CommitOutput {
    SumPayload payload;
    SelectionBits witness;
};

/// x uniform over {0,1}^m minus the all-zero vector; d = sum x_i c_i.
CommitOutput commit(const KnapsackInstance& c_a, Rng& rng);

Verdict verify(const KnapsackInstance& c_claimed, const SumPayload& payload, const SelectionBits& witness,
               Bit claimed);

/// Every nonzero x with sum x_i c_i == d, sorted lexicographically by x.
/// Plain: direct 2^m enumeration (m <= 20). Meet-in-the-middle: two half
/// tables joined on the residual (m <= 24). Both must return the same set.
std::vector<SelectionBits> find_all_representations_plain(std::uint64_t d, const KnapsackInstance& c);
std::vector<SelectionBits> find_all_representations_mitm(std::uint64_t d, const KnapsackInstance& c);
std::vector<SelectionBits> find_all_representations(std::uint64_t d, const KnapsackInstance& c);

// sums[mask] for every mask over `elements` (mask bit i selects element i).
std::vector<std::uint64_t> all_subset_sums(std::span<const std::uint64_t> elements);

// Mask form of x: bit i set iff x_{i+1} == 1.
SelectionBits from_mask(std::uint64_t mask, std::uint32_t m);
std::uint64_t to_mask(const SelectionBits& x);

} // namespace subset_sum
} // namespace ct2bc
